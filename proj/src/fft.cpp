// SPDX-License-Identifier: Apache-2.0
//
// bira-twin: digital twin and measurement simulator for a bistatic
// spherical positioning facility
// Copyright (C) 2026 bira-twin contributors
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
// ------------------------------------------------------------------------

#include "bira/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace bira
{
    namespace
    {
        std::mutex plan_mutex;

        fftw_plan plan_for(int n, int sign)
        {
            static std::map<std::pair<int, int>, fftw_plan> cache;
            std::lock_guard<std::mutex> lock(plan_mutex);
            auto it = cache.find({n, sign});
            if (it != cache.end())
                return it->second;
            std::vector<cdouble> tmp_in(static_cast<std::size_t>(n)), tmp_out(static_cast<std::size_t>(n));
            fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex *>(tmp_in.data()),
                                           reinterpret_cast<fftw_complex *>(tmp_out.data()), sign,
                                           FFTW_ESTIMATE | FFTW_UNALIGNED);
            if (!p)
                throw Error("internal", "FFTW plan creation failed");
            cache.emplace(std::pair{n, sign}, p);
            return p;
        }

        std::vector<cdouble> transform(const std::vector<cdouble> &x, int sign)
        {
            if (x.empty())
                return {};
            std::vector<cdouble> in = x, out(x.size());
            fftw_plan p = plan_for(static_cast<int>(x.size()), sign);
            fftw_execute_dft(p, reinterpret_cast<fftw_complex *>(in.data()), reinterpret_cast<fftw_complex *>(out.data()));
            return out;
        }
    }

    std::vector<cdouble> dft(const std::vector<cdouble> &x)
    {
        return transform(x, FFTW_FORWARD);
    }

    std::vector<cdouble> idft(const std::vector<cdouble> &x)
    {
        return transform(x, FFTW_BACKWARD);
    }
}
