// combalign - network-wide beam alignment simulator for sub-THz D2D links
// Copyright (C) 2026 the combalign authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// -------------------------------------------------------------------------

#ifndef COMBALIGN_FFT_HPP
#define COMBALIGN_FFT_HPP

#include "combalign/common.hpp"

namespace combalign
{

// Unnormalized DFT: X[m] = sum_n x[n] e^{-j2pi mn/N}. Thread-safe (plans cached
// behind a mutex, executed with the new-array interface).
VectorXcd fft(const VectorXcd &x);

// Unnormalized inverse: x[n] = sum_m X[m] e^{+j2pi mn/N} (no 1/N factor).
VectorXcd ifft_unnormalized(const VectorXcd &X);

// Inverse with the conventional 1/N factor, so ifft(fft(x)) == x.
inline VectorXcd ifft(const VectorXcd &X)
{
    return ifft_unnormalized(X) / static_cast<double>(X.size());
}

// Unitary pair: scaled by 1/sqrt(N) in both directions.
inline VectorXcd fft_unitary(const VectorXcd &x)
{
    return fft(x) / std::sqrt(static_cast<double>(x.size()));
}
inline VectorXcd ifft_unitary(const VectorXcd &X)
{
    return ifft_unnormalized(X) / std::sqrt(static_cast<double>(X.size()));
}

} // namespace combalign

#endif
