/*
 Copyright 2026 The lqtioc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef LQTIOC_PARALLEL_HPP
#define LQTIOC_PARALLEL_HPP

#include <functional>

namespace lqtioc {

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Work is handed out dynamically; the first exception thrown
/// by any body is rethrown after all workers join.
void parallel_for(int count, const std::function<void(int)>& body, int threads = 0);

}  // namespace lqtioc

#endif  // LQTIOC_PARALLEL_HPP
