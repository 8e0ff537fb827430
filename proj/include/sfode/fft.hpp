#pragma once

#include <complex>
#include <vector>

namespace sfode {

// Unnormalized length-n DFTs of arbitrary length.
//   forward:  X_k = sum_j x_j e^{-2 pi i jk/n}
//   backward: x_j = sum_k X_k e^{+2 pi i jk/n}
void dft_forward(std::vector<std::complex<double>>& data);
void dft_backward(std::vector<std::complex<double>>& data);

}  // namespace sfode
