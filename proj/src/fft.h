// Copyright (c) 2026 The NAICL Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

namespace naicl::detail {

// FFTW planning is not thread-safe; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Real-input FFT of fixed size n with an owned plan (FFTW_ESTIMATE, so the
// result does not depend on timing measurements).
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n), in_(n), out_(n / 2 + 1) {
    std::lock_guard lock(fftw_planner_mutex());
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.data(),
                                    reinterpret_cast<fftw_complex*>(out_.data()), FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(out_.data()),
                                    in_.data(), FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  // Views keep the planned buffers in place.
  std::span<double> time() { return in_; }
  std::span<std::complex<double>> spectrum() { return out_; }

  void forward() { fftw_execute(forward_); }
  // Unnormalized: time() ends up scaled by size().
  void inverse() { fftw_execute(inverse_); }

 private:
  std::size_t n_;
  std::vector<double> in_;
  std::vector<std::complex<double>> out_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace naicl::detail
