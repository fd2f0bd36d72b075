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
#include "qres/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

namespace qres {

int PreprocessSpec::n_data_qubits() const {
    require(pad_to >= 2 && (pad_to & (pad_to - 1)) == 0,
            "pad_to must be a power of two >= 2");
    int n = 0;
    for (std::size_t d = pad_to; d > 1; d >>= 1) {
        ++n;
    }
    return n;
}

namespace {

std::uint32_t read_be32(std::ifstream &in, const std::string &path) {
    unsigned char b[4];
    in.read(reinterpret_cast<char *>(b), 4);
    require(in.gcount() == 4, "truncated IDX file: " + path);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

} // namespace

Dataset load_mnist_idx(const std::string &images_path,
                       const std::string &labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    require(img.good(), "cannot open image file: " + images_path);
    const std::uint32_t img_magic = read_be32(img, images_path);
    require(img_magic == 2051,
            "bad image magic in " + images_path + " (expected 2051)");
    const std::uint32_t n_images = read_be32(img, images_path);
    const std::uint32_t rows = read_be32(img, images_path);
    const std::uint32_t cols = read_be32(img, images_path);
    const std::size_t dim = std::size_t{rows} * cols;
    require(dim > 0, "empty image dimensions in " + images_path);

    std::vector<unsigned char> raw(std::size_t{n_images} * dim);
    img.read(reinterpret_cast<char *>(raw.data()),
             static_cast<std::streamsize>(raw.size()));
    require(static_cast<std::size_t>(img.gcount()) == raw.size(),
            "truncated IDX file: " + images_path);

    std::ifstream lab(labels_path, std::ios::binary);
    require(lab.good(), "cannot open label file: " + labels_path);
    const std::uint32_t lab_magic = read_be32(lab, labels_path);
    require(lab_magic == 2049,
            "bad label magic in " + labels_path + " (expected 2049)");
    const std::uint32_t n_labels = read_be32(lab, labels_path);
    require(n_labels == n_images,
            "image/label count mismatch between " + images_path + " and " +
                labels_path);
    std::vector<unsigned char> raw_labels(n_labels);
    lab.read(reinterpret_cast<char *>(raw_labels.data()),
             static_cast<std::streamsize>(raw_labels.size()));
    require(static_cast<std::size_t>(lab.gcount()) == raw_labels.size(),
            "truncated IDX file: " + labels_path);

    Dataset ds;
    ds.feature_dim = dim;
    ds.features.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        ds.features[i] = raw[i] / 255.0;
    }
    ds.labels.assign(raw_labels.begin(), raw_labels.end());
    ds.provenance = "idx:" + images_path;
    return ds;
}

Dataset filter_classes(const Dataset &dataset, std::span<const int> classes,
                       std::optional<std::size_t> subsample,
                       std::uint64_t seed) {
    require(!classes.empty(), "class list must not be empty");

    // Per-class sample indices, in dataset order.
    std::vector<std::vector<std::size_t>> by_class(classes.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        for (std::size_t c = 0; c < classes.size(); ++c) {
            if (dataset.labels[i] == classes[c]) {
                by_class[c].push_back(i);
                break;
            }
        }
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
        require(!by_class[c].empty(),
                "class " + std::to_string(classes[c]) +
                    " absent from the dataset");
    }

    if (subsample) {
        const std::size_t total = *subsample;
        require(total > 0, "subsample size must be positive");
        std::mt19937_64 rng(seed);
        const std::size_t base = total / classes.size();
        std::size_t rem = total % classes.size();
        for (std::size_t c = 0; c < classes.size(); ++c) {
            std::size_t quota = base + (c < rem ? 1 : 0);
            auto &idx = by_class[c];
            require(quota <= idx.size(),
                    "not enough samples of class " +
                        std::to_string(classes[c]) + " for the subsample");
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(quota);
            std::sort(idx.begin(), idx.end());
        }
    }

    Dataset out;
    out.feature_dim = dataset.feature_dim;
    std::size_t n_out = 0;
    for (const auto &idx : by_class) {
        n_out += idx.size();
    }
    require(n_out > 0, "class filter produced an empty dataset");
    out.features.reserve(n_out * dataset.feature_dim);
    out.labels.reserve(n_out);

    // Interleave in original dataset order to keep classes mixed.
    std::vector<std::size_t> cursor(classes.size(), 0);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        for (std::size_t c = 0; c < classes.size(); ++c) {
            if (cursor[c] < by_class[c].size() &&
                by_class[c][cursor[c]] == i) {
                ++cursor[c];
                const auto row = dataset.sample(i);
                out.features.insert(out.features.end(), row.begin(), row.end());
                out.labels.push_back(static_cast<int>(c));
                break;
            }
        }
    }
    out.provenance = dataset.provenance + "|filtered";
    return out;
}

StateVector amplitude_encode(std::span<const double> x,
                             const PreprocessSpec &spec) {
    const int n_qubits = spec.n_data_qubits();
    require(x.size() <= spec.pad_to, "input longer than pad_to");
    double norm2 = 0.0;
    for (double v : x) {
        norm2 += v * v;
    }
    require(norm2 > 0.0, "cannot encode the zero vector");
    const double inv = 1.0 / std::sqrt(norm2);

    std::vector<cplx> amps(spec.pad_to, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < x.size(); ++i) {
        amps[i] = x[i] * inv;
    }
    StateVector sv = StateVector::from_amplitudes(std::move(amps));
    require(sv.num_qubits() == n_qubits, "pad_to/qubit mismatch");
    return sv;
}

Dataset synthetic_two_gaussians(int n_features, int n_samples,
                                double separation, std::uint64_t seed) {
    require(n_features >= 1 && n_samples >= 2, "degenerate synthetic dataset");
    require(separation >= 0.0, "separation must be non-negative");

    const double sigma = 0.05;
    const double offset = separation * sigma / 2.0;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);

    Dataset ds;
    ds.feature_dim = static_cast<std::size_t>(n_features);
    ds.features.resize(std::size_t(n_samples) * n_features);
    ds.labels.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const int label = i % 2;
        ds.labels[i] = label;
        const double mean = 0.5 + (label == 0 ? -offset : offset);
        for (int j = 0; j < n_features; ++j) {
            const double v = mean + noise(rng);
            ds.features[std::size_t(i) * n_features + j] =
                std::clamp(v, 0.0, 1.0);
        }
    }
    ds.provenance = "synthetic-two-gaussians";
    return ds;
}

void write_dataset_csv(const std::string &path, const Dataset &dataset) {
    std::ofstream out(path);
    require(out.good(), "cannot open " + path + " for writing");
    out << "label";
    for (std::size_t j = 0; j < dataset.feature_dim; ++j) {
        out << ",f" << j;
    }
    out << "\n";
    char buf[64];
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        out << dataset.labels[i];
        for (double v : dataset.sample(i)) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            out << buf;
        }
        out << "\n";
    }
}

} // namespace qres
