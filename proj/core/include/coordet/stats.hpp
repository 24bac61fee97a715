/*
 * Copyright (c) 2026, The coordet Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <span>

namespace coordet {

double mean(std::span<const double> xs);
/// Divides by n, so a sample of identical values has exactly zero spread.
double population_std(std::span<const double> xs);
/// Average of the two middle elements for even sizes. Empty input returns NaN.
double median(std::span<const double> xs);

}  // namespace coordet
