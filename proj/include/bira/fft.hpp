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

#ifndef BIRA_FFT_HPP
#define BIRA_FFT_HPP

#include "bira/common.hpp"

#include <vector>

namespace bira
{
    // Unnormalized DFTs: forward X_k = sum x_n e^{-j 2 pi k n / N}, inverse
    // with e^{+j ...}. Plans are cached per length and shared between threads.
    std::vector<cdouble> dft(const std::vector<cdouble> &x);
    std::vector<cdouble> idft(const std::vector<cdouble> &x);
}

#endif
