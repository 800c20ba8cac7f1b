// Copyright 2026 The qmagic Authors
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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmagic/common.hpp"
#include "qmagic/hilbert.hpp"

namespace qmagic {

enum class Model { xx, xxz, syk };

std::string_view to_string(Model m) noexcept;
/// Throws std::invalid_argument for unknown names.
Model parse_model(std::string_view name);

/// Where the alternating sign of the staggered field starts: the field
/// term is (W/2)(-1)^j sigma^z_j with j counted from 1 (`one_based`, odd
/// sites get -W/2) or from 0 (`zero_based`, odd sites get +W/2). With the
/// Neel state up on odd sites, `zero_based` puts the field against the
/// Ising term; that is the orientation whose dynamics reproduces
/// XX < XXZ < SYK for the time-averaged SRE.
enum class Stagger { one_based, zero_based };

std::string_view to_string(Stagger s) noexcept;
Stagger parse_stagger(std::string_view name);

/// Staggered XXZ chain couplings. V = 0 is the XX-staggered chain.
struct XxzParams {
  double J = 1.0;
  double V = 1.0;
  double W = 1.0;
  Stagger stagger = Stagger::zero_based;
};

struct HamiltonianMeta {
  Model model = Model::xxz;
  double J = 1.0;
  double V = 0.0;
  double W = 0.0;
  Stagger stagger = Stagger::zero_based;
  std::uint64_t seed = 0;
};

/// Hermitian operator restricted to the S^z = 0 sector.
struct HamiltonianOperator {
  BasisPtr basis;
  CMatrix dense;
  std::optional<SparseCMatrix> sparse;
  HamiltonianMeta meta;

  Eigen::Index dim() const noexcept { return dense.rows(); }
  /// H * v, using the sparse form when present.
  CVector apply(const CVector& v) const;
  /// max_ij |H_ij - conj(H_ji)|
  double hermiticity_defect() const;
};

/// Periodic chain, bond (L, 1) included once. Requires L >= 4.
HamiltonianOperator build_xxz(const BasisPtr& basis, const XxzParams& params);

/// One independently drawn coupling J_{ij,kl} with pair(i,j) >= pair(k,l),
/// i < j, k < l. Site indices are 0-based here; file formats are 1-based.
struct SykEntry {
  int i = 0, j = 0, k = 0, l = 0;
  Complex value;
};

/// Complex SYK couplings in canonical (independent) form.
struct SykCouplings {
  int sites = 0;
  double J = 1.0;
  std::uint64_t seed = 0;
  std::vector<SykEntry> entries;

  /// Full L^4 tensor, row-major in (i, j, k, l), with all antisymmetry and
  /// Hermiticity images filled in.
  std::vector<Complex> full_tensor() const;
};

/// Lexicographic index of the pair (i, j), i < j, among all pairs of L sites.
int pair_index(int i, int j, int sites) noexcept;

SykCouplings sample_syk_couplings(int sites, double J, std::uint64_t seed);

HamiltonianOperator build_syk(const BasisPtr& basis, const SykCouplings& couplings);

/// JSON: {"L":..,"J":..,"seed":..,"entries":[[i,j,k,l,re,im],...]} with
/// 1-based site indices.
void write_couplings_json(const SykCouplings& c, const std::filesystem::path& path);
SykCouplings read_couplings_json(const std::filesystem::path& path);

/// Little-endian binary: "QSYK" magic, u32 version, u32 L, f64 J, u64 seed,
/// u64 count, then count records of 4 x i32 (1-based sites) + 2 x f64.
void write_couplings_binary(const SykCouplings& c, const std::filesystem::path& path);
SykCouplings read_couplings_binary(const std::filesystem::path& path);

}  // namespace qmagic
