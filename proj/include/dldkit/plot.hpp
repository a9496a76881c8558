/* Copyright 2026 The dldkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef DLDKIT_PLOT_HPP_
#define DLDKIT_PLOT_HPP_

#include <string>

#include "dldkit/trainer.hpp"

namespace dldkit::plot {

// ACC and clean accuracy against epoch, with the EL epoch (if any) marked by
// a dashed vertical line. For inspection only; nothing parses it.
std::string TrainLogSvg(const trainer::TrainLog& log);

}  // namespace dldkit::plot

#endif  // DLDKIT_PLOT_HPP_
