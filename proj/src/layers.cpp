#include "ganforge/layers.hpp"

namespace ganforge {

template class DenseLayer<float>;
template class DenseLayer<double>;
template class Conv2dLayer<float>;
template class Conv2dLayer<double>;
template class ConvTranspose2dLayer<float>;
template class ConvTranspose2dLayer<double>;
template class BatchNorm2dLayer<float>;
template class BatchNorm2dLayer<double>;

}  // namespace ganforge
