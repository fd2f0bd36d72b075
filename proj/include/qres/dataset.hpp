// Copyright 2026 qresnet contributors
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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qres/statevector.hpp"

namespace qres {

/// Labeled real-vector samples with features in [0, 1], flat row-major
/// storage. Immutable after construction by convention.
struct Dataset {
    std::vector<double> features;
    std::vector<int> labels;
    std::size_t feature_dim = 0;
    std::string provenance;

    std::size_t size() const { return labels.size(); }
    std::span<const double> sample(std::size_t i) const {
        return {features.data() + i * feature_dim, feature_dim};
    }
};

/// Preprocessing ahead of amplitude encoding: zero-pad to `pad_to` (a power
/// of two), then L2-normalize.
struct PreprocessSpec {
    std::size_t pad_to = 0;

    int n_data_qubits() const;
};

/// Parses the big-endian IDX pair (image magic 2051, label magic 2049).
/// Pixels are scaled to [0, 1]. Throws on wrong magic, truncation, or an
/// image/label count mismatch.
Dataset load_mnist_idx(const std::string &images_path,
                       const std::string &labels_path);

/// Keeps the listed classes, remapping labels to 0..k-1 in list order.
/// When `subsample` is set, draws a seeded class-balanced subset of that
/// total size. Throws if a requested class is absent or the result is empty.
Dataset filter_classes(const Dataset &dataset, std::span<const int> classes,
                       std::optional<std::size_t> subsample,
                       std::uint64_t seed);

/// Zero-pads x to spec.pad_to, L2-normalizes, and interprets entry i as the
/// amplitude of |i>. Rejects the zero vector.
StateVector amplitude_encode(std::span<const double> x,
                             const PreprocessSpec &spec);

/// Two isotropic Gaussian clusters in [0, 1]^n separated by `separation`
/// standard deviations; labels by cluster. Deterministic in the seed.
Dataset synthetic_two_gaussians(int n_features, int n_samples,
                                double separation, std::uint64_t seed);

/// CSV dump: header `label,f0,f1,...`, one row per sample.
void write_dataset_csv(const std::string &path, const Dataset &dataset);

} // namespace qres
