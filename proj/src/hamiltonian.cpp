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

#include "qmagic/hamiltonian.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

namespace qmagic {

namespace {

// Largest sector dimension for which a dense copy is kept (L = 14).
constexpr std::size_t kMaxDenseDim = 3432;

// Product of sigma^z over sites 0..site-1 (0-based), i.e. the Jordan-Wigner
// string left of `site`, evaluated on a basis word.
inline int string_sign(std::uint32_t bits, int site) noexcept {
  const std::uint32_t below = bits & ((1U << site) - 1U);
  const int downs = site - std::popcount(below);
  return (downs & 1) ? -1 : 1;
}

}  // namespace

std::string_view to_string(Model m) noexcept {
  switch (m) {
    case Model::xx: return "xx";
    case Model::xxz: return "xxz";
    case Model::syk: return "syk";
  }
  return "?";
}

std::string_view to_string(Stagger s) noexcept { return s == Stagger::one_based ? "one_based" : "zero_based"; }

Stagger parse_stagger(std::string_view name) {
  if (name == "one_based") return Stagger::one_based;
  if (name == "zero_based") return Stagger::zero_based;
  throw std::invalid_argument("unknown stagger convention '" + std::string(name) +
                              "' (expected one_based or zero_based)");
}

Model parse_model(std::string_view name) {
  if (name == "xx") return Model::xx;
  if (name == "xxz") return Model::xxz;
  if (name == "syk") return Model::syk;
  throw std::invalid_argument("unknown model '" + std::string(name) + "' (expected xx, xxz or syk)");
}

CVector HamiltonianOperator::apply(const CVector& v) const {
  if (sparse) return (*sparse) * v;
  return dense * v;
}

double HamiltonianOperator::hermiticity_defect() const {
  if (dense.size() == 0 && sparse) {
    const SparseCMatrix diff = SparseCMatrix(sparse->adjoint()) - *sparse;
    double m = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
      for (SparseCMatrix::InnerIterator it(diff, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
  }
  return (dense - dense.adjoint()).cwiseAbs().maxCoeff();
}

HamiltonianOperator build_xxz(const BasisPtr& basis, const XxzParams& params) {
  const int L = basis->sites();
  if (L < 4) throw std::invalid_argument("build_xxz: periodic chain needs L >= 4, got " + std::to_string(L));
  if (!std::isfinite(params.J) || !std::isfinite(params.V) || !std::isfinite(params.W))
    throw std::invalid_argument("build_xxz: non-finite coupling");

  // Sign of the field on 1-based site j is (-1)^(j + offset).
  const int offset = params.stagger == Stagger::one_based ? 0 : 1;
  const auto n = static_cast<Eigen::Index>(basis->dim());
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(L + 1));

  for (Eigen::Index col = 0; col < n; ++col) {
    const SpinConfig c = (*basis)[static_cast<std::size_t>(col)];
    double diag = 0.0;
    for (int j = 1; j <= L; ++j) {
      const int next = (j % L) + 1;
      diag += 0.25 * params.V * c.spin(j) * c.spin(next);
      diag += 0.5 * params.W * (((j + offset) % 2 == 0) ? 1 : -1) * c.spin(j);
      if (params.J != 0.0 && c.up(j) != c.up(next)) {
        const SpinConfig swapped{c.bits ^ (1U << (j - 1)) ^ (1U << (next - 1))};
        triplets.emplace_back(static_cast<Eigen::Index>(basis->rank(swapped)), col, 0.5 * params.J);
      }
    }
    triplets.emplace_back(col, col, diag);
  }

  HamiltonianOperator h;
  h.basis = basis;
  h.meta = {params.V == 0.0 ? Model::xx : Model::xxz, params.J, params.V, params.W, params.stagger, 0};
  SparseCMatrix sp(n, n);
  sp.setFromTriplets(triplets.begin(), triplets.end());
  sp.makeCompressed();
  if (basis->dim() <= kMaxDenseDim) h.dense = CMatrix(sp);
  h.sparse = std::move(sp);
  return h;
}

int pair_index(int i, int j, int sites) noexcept {
  // Pairs (0,1), (0,2), ..., (0,L-1), (1,2), ...
  return i * sites - i * (i + 1) / 2 + (j - i - 1);
}

SykCouplings sample_syk_couplings(int sites, double J, std::uint64_t seed) {
  if (sites < 4 || sites % 2 != 0 || sites > kMaxSites)
    throw std::invalid_argument("sample_syk_couplings: L must be even and in [4, 16]");
  if (!(J > 0.0)) throw std::invalid_argument("sample_syk_couplings: J must be positive");

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < sites; ++i)
    for (int j = i + 1; j < sites; ++j) pairs.emplace_back(i, j);

  Rng rng(seed);
  std::normal_distribution<double> diag_dist(0.0, J);
  std::normal_distribution<double> part_dist(0.0, J / std::sqrt(2.0));

  SykCouplings c;
  c.sites = sites;
  c.J = J;
  c.seed = seed;
  c.entries.reserve(pairs.size() * (pairs.size() + 1) / 2);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (std::size_t q = 0; q <= p; ++q) {
      Complex v;
      if (p == q) {
        v = diag_dist(rng);
      } else {
        const double re = part_dist(rng);
        const double im = part_dist(rng);
        v = Complex(re, im);
      }
      c.entries.push_back({pairs[p].first, pairs[p].second, pairs[q].first, pairs[q].second, v});
    }
  }
  return c;
}

std::vector<Complex> SykCouplings::full_tensor() const {
  const int L = sites;
  std::vector<Complex> t(static_cast<std::size_t>(L) * L * L * L, Complex(0.0, 0.0));
  auto at = [&](int i, int j, int k, int l) -> Complex& {
    return t[((static_cast<std::size_t>(i) * L + j) * L + k) * L + l];
  };
  for (const auto& e : entries) {
    const Complex v = e.value;
    const Complex w = std::conj(v);
    at(e.i, e.j, e.k, e.l) = v;
    at(e.j, e.i, e.k, e.l) = -v;
    at(e.i, e.j, e.l, e.k) = -v;
    at(e.j, e.i, e.l, e.k) = v;
    at(e.k, e.l, e.i, e.j) = w;
    at(e.l, e.k, e.i, e.j) = -w;
    at(e.k, e.l, e.j, e.i) = -w;
    at(e.l, e.k, e.j, e.i) = w;
  }
  return t;
}

HamiltonianOperator build_syk(const BasisPtr& basis, const SykCouplings& couplings) {
  const int L = basis->sites();
  if (couplings.sites != L)
    throw std::invalid_argument("build_syk: couplings for L=" + std::to_string(couplings.sites) +
                                " applied to basis with L=" + std::to_string(L));
  if (basis->dim() > kMaxDenseDim) throw CapacityError("build_syk: sector too large for dense storage");

  const auto tensor = couplings.full_tensor();
  auto coupling = [&](int i, int j, int k, int l) {
    return tensor[((static_cast<std::size_t>(i) * L + j) * L + k) * L + l];
  };
  const double prefactor = 1.0 / std::sqrt(static_cast<double>(L) * L * L);

  const auto n = static_cast<Eigen::Index>(basis->dim());
  CMatrix h = CMatrix::Zero(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    const std::uint32_t c0 = (*basis)[static_cast<std::size_t>(col)].bits;
    // Operators act right to left: lower l, lower k, raise j, raise i.
    for (int l = 0; l < L; ++l) {
      if (!((c0 >> l) & 1U)) continue;
      const std::uint32_t c1 = c0 ^ (1U << l);
      const int s1 = string_sign(c1, l);
      for (int k = 0; k < L; ++k) {
        if (!((c1 >> k) & 1U)) continue;
        const std::uint32_t c2 = c1 ^ (1U << k);
        const int s2 = s1 * string_sign(c2, k);
        for (int j = 0; j < L; ++j) {
          if ((c2 >> j) & 1U) continue;
          const std::uint32_t c3 = c2 | (1U << j);
          const int s3 = s2 * string_sign(c3, j);
          for (int i = 0; i < L; ++i) {
            if ((c3 >> i) & 1U) continue;
            const std::uint32_t c4 = c3 | (1U << i);
            const int s4 = s3 * string_sign(c4, i);
            const Complex v = coupling(i, j, k, l);
            if (v == Complex(0.0, 0.0)) continue;
            const auto row = static_cast<Eigen::Index>(basis->rank(SpinConfig{c4}));
            h(row, col) += prefactor * static_cast<double>(s4) * v;
          }
        }
      }
    }
  }

  HamiltonianOperator op;
  op.basis = basis;
  op.dense = std::move(h);
  op.meta = {Model::syk, couplings.J, 0.0, 0.0, Stagger::zero_based, couplings.seed};
  return op;
}

void write_couplings_json(const SykCouplings& c, const std::filesystem::path& path) {
  nlohmann::json j;
  j["L"] = c.sites;
  j["J"] = c.J;
  j["seed"] = c.seed;
  auto& arr = j["entries"] = nlohmann::json::array();
  for (const auto& e : c.entries)
    arr.push_back({e.i + 1, e.j + 1, e.k + 1, e.l + 1, e.value.real(), e.value.imag()});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << j.dump(1) << '\n';
}

SykCouplings read_couplings_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  const auto j = nlohmann::json::parse(in);
  SykCouplings c;
  c.sites = j.at("L").get<int>();
  c.J = j.at("J").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& e : j.at("entries")) {
    SykEntry s{e.at(0).get<int>() - 1, e.at(1).get<int>() - 1, e.at(2).get<int>() - 1, e.at(3).get<int>() - 1,
               Complex(e.at(4).get<double>(), e.at(5).get<double>())};
    c.entries.push_back(s);
  }
  return c;
}

namespace {

template <class T>
void put(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "binary coupling format assumes little-endian host");
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated coupling file");
  return v;
}

constexpr std::uint32_t kBinaryVersion = 1;

}  // namespace

void write_couplings_binary(const SykCouplings& c, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write("QSYK", 4);
  put<std::uint32_t>(out, kBinaryVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.sites));
  put<double>(out, c.J);
  put<std::uint64_t>(out, c.seed);
  put<std::uint64_t>(out, c.entries.size());
  for (const auto& e : c.entries) {
    for (int s : {e.i, e.j, e.k, e.l}) put<std::int32_t>(out, s + 1);
    put<double>(out, e.value.real());
    put<double>(out, e.value.imag());
  }
}

SykCouplings read_couplings_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string_view(magic, 4) != "QSYK") throw std::runtime_error("'" + path.string() + "' is not a coupling file");
  if (get<std::uint32_t>(in) != kBinaryVersion) throw std::runtime_error("unsupported coupling file version");
  SykCouplings c;
  c.sites = static_cast<int>(get<std::uint32_t>(in));
  c.J = get<double>(in);
  c.seed = get<std::uint64_t>(in);
  const auto count = get<std::uint64_t>(in);
  c.entries.reserve(count);
  for (std::uint64_t n = 0; n < count; ++n) {
    SykEntry e;
    e.i = get<std::int32_t>(in) - 1;
    e.j = get<std::int32_t>(in) - 1;
    e.k = get<std::int32_t>(in) - 1;
    e.l = get<std::int32_t>(in) - 1;
    const double re = get<double>(in);
    const double im = get<double>(in);
    e.value = Complex(re, im);
    c.entries.push_back(e);
  }
  return c;
}

}  // namespace qmagic
