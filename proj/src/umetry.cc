#include "ultratext/umetry.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <unordered_map>

#include "ultratext/error.h"
#include "ultratext/parallel.h"

namespace ultratext {
namespace {

std::array<double, 3> sorted3(double a, double b, double c) {
  std::array<double, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  return v;
}

// Unbiased draw in [0, bound) from a 64-bit engine.
std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = gen();
    if (r >= threshold) return r % bound;
  }
}

// Walks lexicographic triplet ranks in increasing order.
class TripletCursor {
 public:
  explicit TripletCursor(std::uint64_t n) : n_(n) {}

  void advance_to(std::uint64_t rank) {
    while (rank >= base_i_ + block_i()) {
      base_i_ += block_i();
      ++i_;
      j_ = i_ + 1;
      base_j_ = base_i_;
    }
    while (rank >= base_j_ + (n_ - 1 - j_)) {
      base_j_ += n_ - 1 - j_;
      ++j_;
    }
    k_ = j_ + 1 + (rank - base_j_);
  }

  std::uint64_t i() const { return i_; }
  std::uint64_t j() const { return j_; }
  std::uint64_t k() const { return k_; }

 private:
  std::uint64_t block_i() const {
    const std::uint64_t r = n_ - 1 - i_;
    return r * (r - 1) / 2;
  }

  std::uint64_t n_;
  std::uint64_t i_ = 0, j_ = 1, k_ = 2;
  std::uint64_t base_i_ = 0, base_j_ = 0;
};

}  // namespace

std::string to_string(TripletClass c) {
  switch (c) {
    case TripletClass::kTrivial:
      return "trivial";
    case TripletClass::kEquilateral:
      return "equilateral";
    case TripletClass::kIsoscelesSmallBase:
      return "isosceles";
    case TripletClass::kNonUltrametric:
      return "nonUM";
  }
  return "?";
}

TripletClass classify_coded_triplet(int d12, int d13, int d23) {
  for (int c : {d12, d13, d23}) {
    if (c < 0 || c > 2) {
      throw DomainError("code out of range: " + std::to_string(c));
    }
  }
  return classify_codes(d12, d13, d23);
}

TripletClass classify_codes(int d12, int d13, int d23) {
  std::array<int, 3> v{d12, d13, d23};
  std::sort(v.begin(), v.end());
  if (v[0] == 0) return TripletClass::kTrivial;
  if (v[0] == v[2]) return TripletClass::kEquilateral;
  if (v[1] == v[2]) return TripletClass::kIsoscelesSmallBase;
  return TripletClass::kNonUltrametric;
}

AngleClassification classify_angle_triplet(std::span<const double> a,
                                           std::span<const double> b,
                                           std::span<const double> c,
                                           double tol_rad) {
  if (a.size() != b.size() || a.size() != c.size()) {
    throw DomainError("triplet vectors differ in dimension");
  }
  const std::size_t dim = a.size();
  // Dot products of edge vectors from each vertex.
  double ab_ab = 0, ac_ac = 0, bc_bc = 0, ab_ac = 0, ba_bc = 0, ca_cb = 0;
  for (std::size_t r = 0; r < dim; ++r) {
    const double ab = b[r] - a[r];
    const double ac = c[r] - a[r];
    const double bc = c[r] - b[r];
    ab_ab += ab * ab;
    ac_ac += ac * ac;
    bc_bc += bc * bc;
    ab_ac += ab * ac;
    ba_bc += -ab * bc;
    ca_cb += ac * bc;
  }
  if (ab_ab == 0 || ac_ac == 0 || bc_bc == 0) {
    return {false, TripletClass::kTrivial};
  }
  auto angle = [](double dot, double n1, double n2) {
    const double cosine = dot / std::sqrt(n1 * n2);
    return std::acos(std::clamp(cosine, -1.0, 1.0));
  };
  const auto s = sorted3(angle(ab_ac, ab_ab, ac_ac), angle(ba_bc, ab_ab, bc_bc),
                         angle(ca_cb, ac_ac, bc_bc));
  if (s[2] - s[1] > tol_rad) return {false, TripletClass::kNonUltrametric};
  if (s[2] - s[0] <= tol_rad) return {true, TripletClass::kEquilateral};
  return {true, TripletClass::kIsoscelesSmallBase};
}

bool ultrametric_triplet_check(double d12, double d13, double d23,
                               double rel_tol) {
  for (double d : {d12, d13, d23}) {
    if (!std::isfinite(d)) throw DomainError("non-finite distance");
    if (d < 0) throw DomainError("negative distance");
  }
  const auto s = sorted3(d12, d13, d23);
  return s[2] - s[1] <= rel_tol * s[2];
}

TripletClass classify_distance_triplet(double d12, double d13, double d23,
                                       double rel_tol) {
  if (!ultrametric_triplet_check(d12, d13, d23, rel_tol)) {
    return std::min({d12, d13, d23}) == 0 ? TripletClass::kTrivial
                                          : TripletClass::kNonUltrametric;
  }
  const auto s = sorted3(d12, d13, d23);
  if (s[0] == 0) return TripletClass::kTrivial;
  if (s[2] - s[0] <= rel_tol * s[2]) return TripletClass::kEquilateral;
  return TripletClass::kIsoscelesSmallBase;
}

TripletClass CodedClassifier::classify(std::size_t i, std::size_t j,
                                       std::size_t k) const {
  const auto c = coded_.triplet_codes(i, j, k);
  return classify_codes(c[0], c[1], c[2]);
}

std::string CodedClassifier::name() const {
  return coded_.mode() == ThresholdMode::kGlobalMean ? "coded"
                                                     : "coded-per-triplet";
}

AngleClassifier::AngleClassifier(const Eigen::MatrixXd& coords, double tol_rad)
    : coords_(coords), tol_(tol_rad) {}

TripletClass AngleClassifier::classify(std::size_t i, std::size_t j,
                                       std::size_t k) const {
  const auto dim = static_cast<std::size_t>(coords_.cols());
  auto row = [&](std::size_t r) {
    return std::span<const double>(
        coords_.data() + r * dim, dim);
  };
  return classify_angle_triplet(row(i), row(j), row(k), tol_).triplet_class;
}

TripletClass DistanceClassifier::classify(std::size_t i, std::size_t j,
                                          std::size_t k) const {
  const auto a = static_cast<Eigen::Index>(i);
  const auto b = static_cast<Eigen::Index>(j);
  const auto c = static_cast<Eigen::Index>(k);
  return classify_distance_triplet(d_(a, b), d_(a, c), d_(b, c), rel_tol_);
}

void ClassCounts::add(TripletClass c) {
  switch (c) {
    case TripletClass::kTrivial:
      ++trivial;
      break;
    case TripletClass::kEquilateral:
      ++equilateral;
      break;
    case TripletClass::kIsoscelesSmallBase:
      ++isosceles;
      break;
    case TripletClass::kNonUltrametric:
      ++non_ultrametric;
      break;
  }
}

ClassCounts& ClassCounts::operator+=(const ClassCounts& o) {
  trivial += o.trivial;
  equilateral += o.equilateral;
  isosceles += o.isosceles;
  non_ultrametric += o.non_ultrametric;
  return *this;
}

std::string to_string(ScanMode mode) {
  switch (mode) {
    case ScanMode::kGlobalExhaustive:
      return "global-exhaustive";
    case ScanMode::kGlobalSampled:
      return "global-sampled";
    case ScanMode::kLinear:
      return "linear";
  }
  return "?";
}

ClassProportions UltrametricityReport::proportions() const {
  const auto total = static_cast<double>(counts.total());
  if (total == 0) return {};
  return {static_cast<double>(counts.trivial) / total,
          static_cast<double>(counts.equilateral) / total,
          static_cast<double>(counts.isosceles) / total,
          static_cast<double>(counts.non_ultrametric) / total};
}

ClassProportions UltrametricityReport::nontrivial_proportions() const {
  const auto total = static_cast<double>(counts.nontrivial());
  if (total == 0) return {};
  return {0.0, static_cast<double>(counts.equilateral) / total,
          static_cast<double>(counts.isosceles) / total,
          static_cast<double>(counts.non_ultrametric) / total};
}

double UltrametricityReport::index() const {
  if (!index_defined()) return 0.0;
  return static_cast<double>(counts.ultrametric()) /
         static_cast<double>(counts.nontrivial());
}

std::optional<double> UltrametricityReport::unique_index() const {
  if (!unique_triplets || *unique_triplets == 0) return std::nullopt;
  return static_cast<double>(unique_ultrametric.value_or(0)) /
         static_cast<double>(*unique_triplets);
}

std::uint64_t triplet_count(std::uint64_t n) {
  if (n < 3) return 0;
  return n * (n - 1) * (n - 2) / 6;
}

std::vector<std::uint64_t> sample_indices(std::uint64_t population,
                                          std::uint64_t count,
                                          std::uint64_t seed) {
  std::vector<std::uint64_t> out;
  if (count >= population) {
    out.resize(population);
    for (std::uint64_t i = 0; i < population; ++i) out[i] = i;
    return out;
  }
  std::mt19937_64 gen(seed);
  // Drawing with replacement, deduplicating and topping up is symmetric in
  // the population, hence uniform over subsets of the target size. Sampling
  // the complement keeps the collision rate below one half.
  const bool complement = count > population / 2;
  const std::uint64_t target = complement ? population - count : count;
  std::vector<std::uint64_t> drawn;
  drawn.reserve(target);
  while (drawn.size() < target) {
    const std::uint64_t missing = target - drawn.size();
    for (std::uint64_t t = 0; t < missing; ++t) {
      drawn.push_back(bounded(gen, population));
    }
    std::sort(drawn.begin(), drawn.end());
    drawn.erase(std::unique(drawn.begin(), drawn.end()), drawn.end());
  }
  if (!complement) return drawn;
  out.reserve(count);
  std::size_t e = 0;
  for (std::uint64_t i = 0; i < population; ++i) {
    if (e < drawn.size() && drawn[e] == i) {
      ++e;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

UltrametricityReport scan_global(const TripletClassifier& classifier,
                                 const ScanOptions& options) {
  const std::uint64_t n = classifier.size();
  if (n < 3) throw DomainError("global scan needs at least 3 points");
  const std::uint64_t population = triplet_count(n);
  UltrametricityReport report;
  report.classifier = classifier.name();
  report.n = n;
  const unsigned threads = std::max(1u, options.threads);
  std::vector<ClassCounts> partial(threads);

  if (population <= options.budget) {
    report.mode = ScanMode::kGlobalExhaustive;
    // Interleave outer rows across workers to balance the triangular loop.
    std::vector<std::thread> pool;
    auto work = [&](unsigned w) {
      ClassCounts local;
      for (std::uint64_t i = w; i + 2 < n; i += threads) {
        for (std::uint64_t j = i + 1; j + 1 < n; ++j) {
          for (std::uint64_t k = j + 1; k < n; ++k) {
            local.add(classifier.classify(i, j, k));
          }
        }
      }
      partial[w] = local;
    };
    if (threads == 1) {
      work(0);
    } else {
      for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
      for (auto& t : pool) t.join();
    }
  } else {
    report.mode = ScanMode::kGlobalSampled;
    report.seed = options.seed;
    report.budget = options.budget;
    const auto ranks = sample_indices(population, options.budget, options.seed);
    parallel_chunks(ranks.size(), threads,
                    [&](std::size_t begin, std::size_t end, unsigned w) {
                      TripletCursor cursor(n);
                      ClassCounts local;
                      for (std::size_t r = begin; r < end; ++r) {
                        cursor.advance_to(ranks[r]);
                        local.add(classifier.classify(cursor.i(), cursor.j(),
                                                      cursor.k()));
                      }
                      partial[w] = local;
                    });
  }
  for (const auto& p : partial) report.counts += p;
  return report;
}

UltrametricityReport scan_linear(const ReducedDocument& reduced,
                                 std::span<const std::string> point_ids,
                                 const TripletClassifier& classifier) {
  const std::size_t length = reduced.length();
  if (length < 3) throw DomainError("linear scan needs at least 3 terms");
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < point_ids.size(); ++i) index[point_ids[i]] = i;
  std::vector<std::size_t> points(length);
  for (std::size_t t = 0; t < length; ++t) {
    auto it = index.find(reduced.terms[t].term);
    if (it == index.end()) {
      throw DomainError("term has no coordinates: " + reduced.terms[t].term);
    }
    points[t] = it->second;
  }

  UltrametricityReport report;
  report.mode = ScanMode::kLinear;
  report.classifier = classifier.name();
  report.n = length;
  std::set<std::array<std::size_t, 3>> unique;
  std::uint64_t unique_um = 0;
  for (std::size_t t = 0; t + 2 < length; ++t) {
    const auto doc = reduced.terms[t].document;
    if (reduced.terms[t + 2].document != doc ||
        reduced.terms[t + 1].document != doc) {
      continue;
    }
    const std::size_t a = points[t], b = points[t + 1], c = points[t + 2];
    if (a == b || a == c || b == c) {
      report.counts.add(TripletClass::kTrivial);
      continue;
    }
    const TripletClass cls = classifier.classify(a, b, c);
    report.counts.add(cls);
    if (cls == TripletClass::kTrivial) continue;
    std::array<std::size_t, 3> key{a, b, c};
    std::sort(key.begin(), key.end());
    if (unique.insert(key).second && is_ultrametric(cls)) ++unique_um;
  }
  report.unique_triplets = unique.size();
  report.unique_ultrametric = unique_um;
  return report;
}

std::string table_header() {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-28s %10s %7s %7s %7s", "Text",
                "Triangles", "Isosc", "Equil", "Non-UM");
  return buf;
}

std::string table_row(std::string_view label,
                      const UltrametricityReport& report) {
  const auto p = report.nontrivial_proportions();
  auto pct = [](double v) { return static_cast<long>(std::lround(100.0 * v)); };
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-28.*s %10llu %7ld %7ld %7ld",
                static_cast<int>(std::min<std::size_t>(label.size(), 28)),
                label.data(),
                static_cast<unsigned long long>(report.total_considered()),
                pct(p.isosceles), pct(p.equilateral), pct(p.non_ultrametric));
  return buf;
}

}  // namespace ultratext
