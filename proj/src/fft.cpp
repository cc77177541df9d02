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

#include "combalign/fft.hpp"

#include <map>
#include <mutex>

#include <fftw3.h>

namespace combalign
{

namespace
{

// FFTW plan creation is not thread-safe; execution via fftw_execute_dft is.
// Plans are created FFTW_UNALIGNED so they can run on any array of the size.
std::mutex plan_mutex;

fftw_plan get_plan(int n, int sign)
{
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;
    // plan out-of-place: the new-array execute below is out-of-place too
    std::vector<cplx> din(static_cast<size_t>(n)), dout(static_cast<size_t>(n));
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex *>(din.data()),
                                   reinterpret_cast<fftw_complex *>(dout.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, p);
    return p;
}

VectorXcd run(const VectorXcd &x, int sign)
{
    require(x.size() > 0, "fft", "empty input");
    VectorXcd in = x, out(x.size());
    fftw_plan p = get_plan(static_cast<int>(x.size()), sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex *>(in.data()),
                     reinterpret_cast<fftw_complex *>(out.data()));
    return out;
}

} // namespace

VectorXcd fft(const VectorXcd &x) { return run(x, FFTW_FORWARD); }

VectorXcd ifft_unnormalized(const VectorXcd &X) { return run(X, FFTW_BACKWARD); }

} // namespace combalign
