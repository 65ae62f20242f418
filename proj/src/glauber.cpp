#include "adiabatic/glauber.hpp"

#include "adiabatic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace adiabatic {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int k = 0; k < exp; ++k) r *= base;
  return r;
}

void require_enumerable(const TorusLattice& lattice) {
  if (lattice.sites() > kMaxEnumeratedSites) {
    throw EnumerationCapExceeded("lattice has " + std::to_string(lattice.sites()) +
                                 " sites; enumeration is capped at " +
                                 std::to_string(kMaxEnumeratedSites));
  }
}

void require_site(const SpinConfig& x, std::size_t j, const TorusLattice& lattice) {
  if (x.size() != lattice.sites()) throw DimensionMismatch("configuration size differs from lattice");
  if (j >= lattice.sites()) throw ValidationError("site index out of range");
}

}  // namespace

TorusLattice::TorusLattice(int n, int d) : n_(n), d_(d) {
  if (n < 3) throw ValidationError("torus side n must be >= 3");
  if (d < 1) throw ValidationError("torus dimension d must be >= 1");
  const std::size_t count = ipow(static_cast<std::size_t>(n), d);
  if (count > (std::size_t{1} << 24)) throw ValidationError("torus too large");
  neighbours_.resize(count);
  for (std::size_t site = 0; site < count; ++site) {
    auto c = coordinates(site);
    for (int k = 0; k < d; ++k) {
      for (int delta : {-1, 1}) {
        auto nb = c;
        nb[static_cast<std::size_t>(k)] = (c[static_cast<std::size_t>(k)] + delta + n) % n;
        neighbours_[site].push_back(site_index(nb));
      }
    }
  }
}

bool TorusLattice::adjacent(std::size_t i, std::size_t j) const {
  const auto& nb = neighbours_.at(i);
  return std::find(nb.begin(), nb.end(), j) != nb.end();
}

std::vector<int> TorusLattice::coordinates(std::size_t site) const {
  std::vector<int> c(static_cast<std::size_t>(d_));
  for (int k = 0; k < d_; ++k) {
    c[static_cast<std::size_t>(k)] = static_cast<int>(site % static_cast<std::size_t>(n_));
    site /= static_cast<std::size_t>(n_);
  }
  return c;
}

std::size_t TorusLattice::site_index(const std::vector<int>& coordinates) const {
  if (coordinates.size() != static_cast<std::size_t>(d_)) {
    throw DimensionMismatch("coordinate vector has wrong dimension");
  }
  std::size_t site = 0;
  for (int k = d_ - 1; k >= 0; --k) {
    const int c = coordinates[static_cast<std::size_t>(k)];
    if (c < 0 || c >= n_) throw ValidationError("coordinate out of range");
    site = site * static_cast<std::size_t>(n_) + static_cast<std::size_t>(c);
  }
  return site;
}

std::vector<std::vector<std::size_t>> TorusLattice::automorphisms() const {
  std::vector<std::vector<std::size_t>> result;
  std::vector<int> axes(static_cast<std::size_t>(d_));
  std::iota(axes.begin(), axes.end(), 0);
  const std::size_t count = sites();
  do {
    for (unsigned mask = 0; mask < (1u << d_); ++mask) {
      for (std::size_t shift = 0; shift < count; ++shift) {
        const auto offset = coordinates(shift);
        std::vector<std::size_t> perm(count);
        for (std::size_t site = 0; site < count; ++site) {
          const auto c = coordinates(site);
          std::vector<int> image(static_cast<std::size_t>(d_));
          for (int k = 0; k < d_; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            int v = ((mask >> k) & 1u) ? (n_ - c[uk]) % n_ : c[uk];
            v = (v + offset[static_cast<std::size_t>(axes[uk])]) % n_;
            image[static_cast<std::size_t>(axes[uk])] = v;
          }
          perm[site] = site_index(image);
        }
        result.push_back(std::move(perm));
      }
    }
  } while (std::next_permutation(axes.begin(), axes.end()));
  return result;
}

SpinConfig::SpinConfig(std::vector<int> spins) : spins_(std::move(spins)) {
  for (int v : spins_) {
    if (v != 1 && v != -1) throw ValidationError("spins must be exactly -1 or +1");
  }
}

SpinConfig SpinConfig::from_index(std::uint64_t index, std::size_t sites) {
  if (sites > 63) throw ValidationError("too many sites for an integer index");
  if (index >> sites) throw ValidationError("configuration index out of range");
  std::vector<int> s(sites);
  for (std::size_t i = 0; i < sites; ++i) s[i] = ((index >> i) & 1u) ? 1 : -1;
  return SpinConfig(std::move(s));
}

SpinConfig SpinConfig::all(std::size_t sites, int spin) {
  return SpinConfig(std::vector<int>(sites, spin));
}

std::uint64_t SpinConfig::index() const {
  if (spins_.size() > 63) throw ValidationError("too many sites for an integer index");
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < spins_.size(); ++i) {
    if (spins_[i] == 1) idx |= (std::uint64_t{1} << i);
  }
  return idx;
}

SpinConfig SpinConfig::flipped(std::size_t site) const {
  auto s = spins_;
  s.at(site) = -s.at(site);
  return SpinConfig(std::move(s));
}

SpinConfig SpinConfig::with_spin(std::size_t site, int spin) const {
  auto s = spins_;
  s.at(site) = spin;
  return SpinConfig(std::move(s));
}

std::string SpinConfig::bitstring() const {
  std::string out(spins_.size(), '0');
  for (std::size_t i = 0; i < spins_.size(); ++i) {
    if (spins_[i] == 1) out[i] = '1';
  }
  return out;
}

IsingParams::IsingParams(double b, BetaRole r) : beta(b), role(r) {
  if (!std::isfinite(b) || b < 0.0) throw ValidationError("beta must be finite and >= 0");
}

int neighbour_sum(const SpinConfig& x, std::size_t j, const TorusLattice& lattice) {
  require_site(x, j, lattice);
  int h = 0;
  for (auto i : lattice.neighbours(j)) h += x[i];
  return h;
}

double hamiltonian(const SpinConfig& x, const TorusLattice& lattice, const IsingParams& params) {
  if (x.size() != lattice.sites()) throw DimensionMismatch("configuration size differs from lattice");
  long twice = 0;
  for (std::size_t i = 0; i < lattice.sites(); ++i) {
    for (auto j : lattice.neighbours(i)) twice += x[i] * x[j];
  }
  return -params.beta * 0.5 * static_cast<double>(twice);
}

double local_hamiltonian(const SpinConfig& x, std::size_t j, const TorusLattice& lattice,
                         const IsingParams& params) {
  return -params.beta * static_cast<double>(x[j] * neighbour_sum(x, j, lattice));
}

double flip_probability(const SpinConfig& x, std::size_t j, const TorusLattice& lattice,
                        const IsingParams& params) {
  const double h = neighbour_sum(x, j, lattice);
  return 0.5 * (1.0 + std::tanh(params.beta * h));
}

Distribution gibbs_distribution(const TorusLattice& lattice, const IsingParams& params) {
  require_enumerable(lattice);
  const std::size_t count = std::size_t{1} << lattice.sites();
  Eigen::VectorXd log_w(static_cast<Eigen::Index>(count));
  for (std::size_t c = 0; c < count; ++c) {
    log_w[static_cast<Eigen::Index>(c)] =
        -hamiltonian(SpinConfig::from_index(c, lattice.sites()), lattice, params);
  }
  const double top = log_w.maxCoeff();
  Eigen::VectorXd w = (log_w.array() - top).exp().matrix();
  w /= w.sum();
  return Distribution(std::move(w));
}

Generator glauber_generator(const TorusLattice& lattice, const IsingParams& params,
                            double per_site_rate) {
  require_enumerable(lattice);
  if (!std::isfinite(per_site_rate) || per_site_rate <= 0.0) {
    throw ValidationError("per-site rate must be > 0");
  }
  const std::size_t sites = lattice.sites();
  const std::size_t count = std::size_t{1} << sites;
  Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(count),
                                                static_cast<Eigen::Index>(count));
  for (std::size_t c = 0; c < count; ++c) {
    const SpinConfig x = SpinConfig::from_index(c, sites);
    for (std::size_t j = 0; j < sites; ++j) {
      const double p_plus = flip_probability(x, j, lattice, params);
      const double p_opposite = x[j] == 1 ? 1.0 - p_plus : p_plus;
      rates(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c ^ (std::size_t{1} << j))) =
          per_site_rate * p_opposite;
    }
  }
  return Generator::from_rates(std::move(rates));
}

Schedule adiabatic_glauber_schedule(double a, double beta1, double beta2) {
  return Schedule::glauber(a, beta1, beta2);
}

double derive_schedule_oracle(double a, double beta1, double beta2, double s) {
  if (a == 0.0) throw DegenerateClass("neighbour sum 0: initial and final rates coincide");
  if (beta1 == beta2) throw DegenerateClass("beta1 == beta2: initial and final rates coincide");
  if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("s outside [0,1]");
  // Flip of a +1 spin whose neighbours sum to a: H(x+) = -beta a, H(x-) = +beta a.
  auto rate_at = [](double h_plus, double h_minus) {
    // P(reselect -1) = e^{-H(x-)} / (e^{-H(x-)} + e^{-H(x+)})
    const double top = std::max(-h_plus, -h_minus);
    const double wm = std::exp(-h_minus - top);
    const double wp = std::exp(-h_plus - top);
    return wm / (wm + wp);
  };
  const double h1_plus = -beta1 * a;
  const double h1_minus = beta1 * a;
  const double h2_plus = -beta2 * a;
  const double h2_minus = beta2 * a;
  const double q_init = rate_at(h1_plus, h1_minus);
  const double q_final = rate_at(h2_plus, h2_minus);
  const double q_s = rate_at((1.0 - s) * h1_plus + s * h2_plus, (1.0 - s) * h1_minus + s * h2_minus);
  return (q_s - q_init) / (q_final - q_init);
}

RateBound torus_rate_bound(const TorusLattice& lattice, double per_site_rate) {
  if (!std::isfinite(per_site_rate) || per_site_rate <= 0.0) {
    throw ValidationError("per-site rate must be > 0");
  }
  return RateBound(static_cast<double>(lattice.sites()) * per_site_rate);
}

std::vector<std::size_t> orbit_representatives(const TorusLattice& lattice) {
  require_enumerable(lattice);
  const std::size_t sites = lattice.sites();
  const std::size_t count = std::size_t{1} << sites;
  const std::size_t mask = count - 1;
  const auto group = lattice.automorphisms();
  std::vector<bool> seen(count, false);
  std::vector<std::size_t> reps;
  for (std::size_t c = 0; c < count; ++c) {
    if (seen[c]) continue;
    reps.push_back(c);
    for (const auto& perm : group) {
      std::size_t image = 0;
      for (std::size_t i = 0; i < sites; ++i) {
        if ((c >> i) & 1u) image |= std::size_t{1} << perm[i];
      }
      seen[image] = true;
      seen[image ^ mask] = true;
    }
  }
  return reps;
}

GlauberSpec build_adiabatic_glauber_spec(const TorusLattice& lattice, double beta1, double beta2,
                                         double per_site_rate) {
  require_enumerable(lattice);
  const IsingParams initial(beta1, BetaRole::initial);
  const IsingParams final(beta2, BetaRole::final);
  Generator q_initial = glauber_generator(lattice, initial, per_site_rate);
  Generator q_final = glauber_generator(lattice, final, per_site_rate);
  const bool degenerate = beta1 == beta2;

  ScheduleFamily::Builder builder(Schedule::linear(), true);
  if (!degenerate) {
    std::map<int, std::size_t> class_slot;
    for (int a = 2; a <= 2 * lattice.d(); a += 2) {
      class_slot[a] = builder.add_slot(adiabatic_glauber_schedule(a, beta1, beta2));
    }
    const std::size_t sites = lattice.sites();
    const std::size_t count = std::size_t{1} << sites;
    for (std::size_t c = 0; c < count; ++c) {
      const SpinConfig x = SpinConfig::from_index(c, sites);
      for (std::size_t j = 0; j < sites; ++j) {
        const int a = std::abs(neighbour_sum(x, j, lattice));
        if (a == 0) continue;
        builder.assign(c, c ^ (std::size_t{1} << j), class_slot.at(a));
      }
    }
  }
  AdiabaticSpec spec =
      AdiabaticSpec::continuous(std::move(q_initial), std::move(q_final), std::move(builder).build(),
                                torus_rate_bound(lattice, per_site_rate));
  return GlauberSpec{spec.with_start_states(orbit_representatives(lattice)), degenerate};
}

}  // namespace adiabatic
