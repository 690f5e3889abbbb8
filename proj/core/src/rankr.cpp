#include "kcut/rankr.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "kcut/alphabet.hpp"
#include "kcut/rank1.hpp"
#include "kcut/rng.hpp"

namespace kcut {

namespace {

/// Largest and smallest eigenvalue of a symmetric 3x3 matrix, closed form.
std::pair<double, double> sym3_eig_range(const Eigen::Matrix3d& G) {
  const double q = G.trace() / 3.0;
  const double p1 = G(0, 1) * G(0, 1) + G(0, 2) * G(0, 2) + G(1, 2) * G(1, 2);
  const double p2 = (G(0, 0) - q) * (G(0, 0) - q) +
                    (G(1, 1) - q) * (G(1, 1) - q) +
                    (G(2, 2) - q) * (G(2, 2) - q) + 2.0 * p1;
  if (p2 <= 0.0) return {q, q};
  const double p = std::sqrt(p2 / 6.0);
  const Eigen::Matrix3d B = (G - q * Eigen::Matrix3d::Identity()) / p;
  const double rdet = std::clamp(B.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(rdet) / 3.0;
  const double lmax = q + 2.0 * p * std::cos(phi);
  const double lmin =
      q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  return {lmax, lmin};
}

struct NullScratch {
  Eigen::MatrixXd M;
  Eigen::VectorXd c_tilde;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd;
};

bool nullvector_svd(NullScratch& s, double& resid, double& norm_err) {
  s.svd.compute(s.M, Eigen::ComputeFullV);
  const auto& sig = s.svd.singularValues();
  const double smax = sig(0);
  const double smin = sig(sig.size() - 1);
  if (!(smax > 0.0) || smin <= kRankTol * smax) return false;
  s.c_tilde = s.svd.matrixV().col(s.M.cols() - 1);
  resid = (s.M * s.c_tilde).cwiseAbs().maxCoeff();
  norm_err = std::abs(s.c_tilde.norm() - 1.0);
  return resid <= kVertexResidualTol;
}

/// 3x4 fast path: null vector from the four signed 3x3 minors (generalized
/// cross product). The rank test needs sigma_min/sigma_max; sigma_max comes
/// accurately from the Gram matrix and the product of all three singular
/// values equals the cross-product norm, which sandwiches sigma_min:
/// cross >= tol * smax^3 guarantees sigma_min > tol * sigma_max, and
/// cross < tol^2 * smax^3 guarantees the opposite. The narrow band in
/// between falls back to the SVD so the accept decision always matches it.
bool nullvector_3x4(NullScratch& s, double& resid, double& norm_err) {
  const Eigen::MatrixXd& M = s.M;
  Eigen::Vector4d c;
  double sign = 1.0;
  for (int k = 0; k < 4; ++k) {
    int col[3], t = 0;
    for (int j = 0; j < 4; ++j) {
      if (j != k) col[t++] = j;
    }
    c(k) = sign * (M(0, col[0]) * (M(1, col[1]) * M(2, col[2]) -
                                   M(1, col[2]) * M(2, col[1])) -
                   M(0, col[1]) * (M(1, col[0]) * M(2, col[2]) -
                                   M(1, col[2]) * M(2, col[0])) +
                   M(0, col[2]) * (M(1, col[0]) * M(2, col[1]) -
                                   M(1, col[1]) * M(2, col[0])));
    sign = -sign;
  }
  const double cross = c.norm();
  const Eigen::Matrix3d G = M * M.transpose();
  const double lmax = sym3_eig_range(G).first;
  if (!(lmax > 0.0)) return false;
  const double smax = std::sqrt(lmax);
  const double s3 = smax * smax * smax;
  if (cross < kRankTol * kRankTol * s3) return false;
  if (cross < kRankTol * s3) return nullvector_svd(s, resid, norm_err);
  s.c_tilde = c / cross;
  resid = (M * s.c_tilde).cwiseAbs().maxCoeff();
  norm_err = std::abs(s.c_tilde.norm() - 1.0);
  return resid <= kVertexResidualTol;
}

bool solve_nullvector(const AugmentedSystem& sys, const std::vector<int>& I,
                      NullScratch& s, double& resid, double& norm_err) {
  const int k = static_cast<int>(I.size());
  const int cols = static_cast<int>(sys.rows.cols());
  s.M.resize(k, cols);
  for (int t = 0; t < k; ++t) {
    s.M.row(t) = sys.rows.row(I[static_cast<std::size_t>(t)]);
  }
  if (k == 3 && cols == 4) return nullvector_3x4(s, resid, norm_err);
  return nullvector_svd(s, resid, norm_err);
}

/// Ambiguous coordinate at a vertex: races either the two labels flanking a
/// bisector or (when the factor row is orthogonal to the direction) all K.
struct Slot {
  int coord = 0;
  int count = 0;
  bool full = false; // choices are 0..K-1; otherwise the pair below
  int pair[2] = {0, 0};

  int choice(int t) const { return full ? t : pair[t]; }
};

/// Group structure of an index set: the coordinate, how many of its rows
/// appear, and the rotation index of the first one.
struct Touched {
  int coord = 0;
  int rows = 0;
  int m = 0;
};

int touched_groups(const std::vector<int>& I, int n, Touched* out) {
  int cnt = 0;
  for (int j : I) {
    const int i = j % n;
    int t = 0;
    while (t < cnt && out[t].coord != i) ++t;
    if (t == cnt) {
      out[cnt].coord = i;
      out[cnt].rows = 1;
      out[cnt].m = j / n;
      ++cnt;
    } else {
      ++out[t].rows;
    }
  }
  return cnt;
}

/// Slots for one direction. A double-row coordinate has V.row(i)*c = 0 and
/// races every label. A single-row coordinate sits on the line of its
/// boundary angle; it races the flanking pair only when alpha_i is on the
/// bisector ray of that line. On the opposite ray the strict nearest label
/// already stands (for odd K it is sector interior; for even K it is the
/// antipodal bisector and the pair shifts by K/2). Returns the combination
/// count, or -1 once it exceeds kExpansionCap.
template <typename AlphaAt>
std::int64_t build_slots(const AlphaAt& alpha_at, const Touched* touched,
                         int ntouched, const std::vector<Cplx>& rotations,
                         int K, Slot* slots, int& nslots) {
  std::int64_t combos = 1;
  nslots = 0;
  for (int t = 0; t < ntouched; ++t) {
    const Touched& g = touched[t];
    Slot s;
    s.coord = g.coord;
    if (g.rows >= 2) {
      s.full = true;
      s.count = K;
    } else {
      const Cplx a = alpha_at(g.coord);
      const Cplx& rho = rotations[static_cast<std::size_t>(g.m)];
      const double ray = rho.real() * a.real() - rho.imag() * a.imag();
      int lo;
      if (ray >= 0.0) {
        lo = g.m;
      } else if (K % 2 == 0) {
        lo = (g.m + K / 2) % K;
      } else {
        continue;
      }
      const int hi = (lo + 1) % K;
      s.count = 2;
      s.pair[0] = std::min(lo, hi);
      s.pair[1] = std::max(lo, hi);
    }
    combos *= s.count;
    if (combos > kExpansionCap) return -1;
    slots[nslots++] = s;
  }
  return combos;
}

/// Strict nearest-root labels (ties toward the smaller label, no
/// expansion), used by the perturbation fallback.
void strict_labels(const Eigen::VectorXcd& alpha,
                   const std::vector<double>& row_norms2,
                   const std::vector<Cplx>& roots, std::vector<int>& out) {
  const int n = static_cast<int>(alpha.size());
  const int K = static_cast<int>(roots.size());
  out.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    if (row_norms2[static_cast<std::size_t>(i)] == 0.0) continue;
    const Cplx a = alpha(i);
    int kbest = 0;
    double sbest = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      const Cplx& w = roots[static_cast<std::size_t>(k)];
      const double s = w.real() * a.real() + w.imag() * a.imag();
      if (s > sbest) {
        sbest = s;
        kbest = k;
      }
    }
    out[static_cast<std::size_t>(i)] = kbest;
  }
}

std::uint64_t fnv1a_mix(std::uint64_t h, std::uint64_t v) {
  h ^= v;
  return h * 1099511628211ULL;
}

std::uint64_t perturbation_seed(const std::vector<int>& I, int sign) {
  std::uint64_t h = 1469598103934665603ULL;
  for (int j : I) h = fnv1a_mix(h, static_cast<std::uint64_t>(j));
  return fnv1a_mix(h, sign > 0 ? 1u : 2u);
}

std::vector<int> canonical_labels(const std::vector<int>& labels, int K) {
  if (labels.empty() || labels[0] == 0) return labels;
  std::vector<int> out(labels.size());
  const int shift = K - labels[0];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = (labels[i] + shift) % K;
  }
  return out;
}

/// Running best under the total order (objective desc, canonical asc).
struct Contender {
  bool valid = false;
  double objective = 0.0;
  std::vector<int> canonical;

  void offer(double obj, const std::vector<int>& labels, int K) {
    if (!valid || obj > objective) {
      valid = true;
      objective = obj;
      canonical = canonical_labels(labels, K);
      return;
    }
    if (obj == objective) {
      auto canon = canonical_labels(labels, K);
      if (canon < canonical) canonical = std::move(canon);
    }
  }

  void merge(const Contender& other) {
    if (!other.valid) return;
    if (!valid || other.objective > objective ||
        (other.objective == objective && other.canonical < canonical)) {
      valid = true;
      objective = other.objective;
      canonical = other.canonical;
    }
  }
};

double binom(double n, int k) {
  if (k < 0 || n < static_cast<double>(k)) return 0.0;
  double v = 1.0;
  for (int t = 0; t < k; ++t) v = v * (n - t) / (t + 1);
  return v;
}

/// Per-batch scratch; all buffers are sized once and reused per vertex.
struct VertexWorkspace {
  NullScratch ns;
  Eigen::VectorXcd c;     // complex direction, kept for the fallback path
  Eigen::VectorXcd alpha; // fallback scratch
  Eigen::VectorXcd z;     // fallback scratch
  std::vector<double> cre, cim;
  std::vector<double> wpr, wpi; // V^H z at the +direction base labels
  std::vector<double> wnr, wni; // same for the -direction
  std::vector<double> wre, wim; // working copy with slot bases applied
  std::vector<int> base_pos;
  std::vector<int> base_neg;
  std::vector<int> labels;
  std::vector<int> idx;
  std::vector<Touched> touched;
  std::vector<Slot> slots;
  std::vector<double> dre, dim;
  int ntouched = 0;
  int nslots = 0;

  void init(int n, int r, int K, int set_size) {
    c.resize(r);
    alpha.resize(n);
    z.resize(n);
    cre.resize(static_cast<std::size_t>(r));
    cim.resize(static_cast<std::size_t>(r));
    wpr.resize(static_cast<std::size_t>(r));
    wpi.resize(static_cast<std::size_t>(r));
    wnr.resize(static_cast<std::size_t>(r));
    wni.resize(static_cast<std::size_t>(r));
    wre.resize(static_cast<std::size_t>(r));
    wim.resize(static_cast<std::size_t>(r));
    base_pos.resize(static_cast<std::size_t>(n));
    base_neg.resize(static_cast<std::size_t>(n));
    touched.resize(static_cast<std::size_t>(set_size));
    slots.resize(static_cast<std::size_t>(set_size));
    dre.resize(static_cast<std::size_t>(set_size * K * r));
    dim.resize(static_cast<std::size_t>(set_size * K * r));
  }
};

/// Read-only inputs shared by every batch of one engine level. The factor
/// and the root table are mirrored into split real/imaginary arrays so the
/// per-vertex kernel runs on plain doubles.
struct EngineContext {
  const Eigen::MatrixXcd* V = nullptr;
  const AugmentedSystem* sys = nullptr;
  const Alphabet* alphabet = nullptr;
  std::vector<double> vre, vim;     // column-major n x r
  std::vector<double> rootr, rooti; // K roots
  std::vector<double> row_norms2;
  int n = 0;
  int r = 0;
  int K = 0;

  void mirror() {
    n = static_cast<int>(V->rows());
    r = static_cast<int>(V->cols());
    K = alphabet->K;
    vre.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(r));
    vim.resize(vre.size());
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < n; ++i) {
        const Cplx v = (*V)(i, j);
        vre[static_cast<std::size_t>(j) * n + i] = v.real();
        vim[static_cast<std::size_t>(j) * n + i] = v.imag();
      }
    }
    rootr.resize(static_cast<std::size_t>(K));
    rooti.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      rootr[static_cast<std::size_t>(k)] = alphabet->roots[k].real();
      rooti[static_cast<std::size_t>(k)] = alphabet->roots[k].imag();
    }
    row_norms2.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      row_norms2[static_cast<std::size_t>(i)] = V->row(i).squaredNorm();
    }
  }
};

struct BatchAccum {
  Contender best;
  std::int64_t accepted = 0;
  double max_residual = 0.0;
  double max_norm_err = 0.0;
};

/// Strict labels for both signs of the direction in one pass over the rows,
/// accumulating w = V^H z for each. The nearest root maximizes the score
/// s_k = Re(conj(root_k) * alpha_i); for -alpha that is the score minimizer,
/// with ties falling to the smaller label on both sides. Specialized on
/// (r, K) so the hot shape gets constant trip counts.
template <int R, int KK>
void fused_pass(const EngineContext& ctx, VertexWorkspace& ws) {
  const int n = ctx.n;
  const int r = R > 0 ? R : ctx.r;
  const int K = KK > 0 ? KK : ctx.K;
  const double* vre = ctx.vre.data();
  const double* vim = ctx.vim.data();
  const double* rootr = ctx.rootr.data();
  const double* rooti = ctx.rooti.data();
  const double* rn2 = ctx.row_norms2.data();
  const double* cre = ws.cre.data();
  const double* cim = ws.cim.data();
  double* wpr = ws.wpr.data();
  double* wpi = ws.wpi.data();
  double* wnr = ws.wnr.data();
  double* wni = ws.wni.data();
  int* bp = ws.base_pos.data();
  int* bn = ws.base_neg.data();
  for (int j = 0; j < r; ++j) wpr[j] = wpi[j] = wnr[j] = wni[j] = 0.0;
  for (int i = 0; i < n; ++i) {
    double ar = 0.0, ai = 0.0;
    for (int j = 0; j < r; ++j) {
      const double vr = vre[static_cast<std::size_t>(j) * n + i];
      const double vi = vim[static_cast<std::size_t>(j) * n + i];
      ar += vr * cre[j] - vi * cim[j];
      ai += vr * cim[j] + vi * cre[j];
    }
    int kp = 0, kn = 0;
    if (rn2[i] != 0.0) {
      double sp = rootr[0] * ar + rooti[0] * ai;
      double sn = sp;
      for (int k = 1; k < K; ++k) {
        const double s = rootr[k] * ar + rooti[k] * ai;
        if (s > sp) {
          sp = s;
          kp = k;
        }
        if (s < sn) {
          sn = s;
          kn = k;
        }
      }
    }
    bp[i] = kp;
    bn[i] = kn;
    const double zpr = rootr[kp], zpi = rooti[kp];
    const double znr = rootr[kn], zni = rooti[kn];
    for (int j = 0; j < r; ++j) {
      const double vr = vre[static_cast<std::size_t>(j) * n + i];
      const double vi = vim[static_cast<std::size_t>(j) * n + i];
      wpr[j] += vr * zpr + vi * zpi;
      wpi[j] += vr * zpi - vi * zpr;
      wnr[j] += vr * znr + vi * zni;
      wni[j] += vr * zni - vi * znr;
    }
  }
}

/// Races the slot expansion of one direction. `base` and the accumulated w
/// come from the fused pass; slot coordinates are re-based onto their first
/// choice before the odometer walks the combinations.
void race_combos(const EngineContext& ctx, VertexWorkspace& ws, bool neg,
                 BatchAccum& acc) {
  const int r = ctx.r;
  const int K = ctx.K;
  const int n = ctx.n;
  const double* vre = ctx.vre.data();
  const double* vim = ctx.vim.data();
  const double* rootr = ctx.rootr.data();
  const double* rooti = ctx.rooti.data();
  const std::vector<int>& base = neg ? ws.base_neg : ws.base_pos;
  double* wr = ws.wre.data();
  double* wi = ws.wim.data();
  {
    const double* sr = neg ? ws.wnr.data() : ws.wpr.data();
    const double* si = neg ? ws.wni.data() : ws.wpi.data();
    for (int j = 0; j < r; ++j) {
      wr[j] = sr[j];
      wi[j] = si[j];
    }
  }
  const int nslots = ws.nslots;
  for (int s = 0; s < nslots; ++s) {
    const Slot& slot = ws.slots[static_cast<std::size_t>(s)];
    const int i = slot.coord;
    const int b0 = slot.choice(0);
    const int old = base[static_cast<std::size_t>(i)];
    if (b0 != old) {
      const double dzr = rootr[b0] - rootr[old];
      const double dzi = rooti[b0] - rooti[old];
      for (int j = 0; j < r; ++j) {
        const double vr = vre[static_cast<std::size_t>(j) * n + i];
        const double vi = vim[static_cast<std::size_t>(j) * n + i];
        wr[j] += vr * dzr + vi * dzi;
        wi[j] += vr * dzi - vi * dzr;
      }
    }
  }
  if (nslots == 0) {
    double obj = 0.0;
    for (int j = 0; j < r; ++j) obj += wr[j] * wr[j] + wi[j] * wi[j];
    if (!acc.best.valid || obj >= acc.best.objective) {
      acc.best.offer(obj, base, K);
    }
    return;
  }
  // Increment table: moving slot s to choice t adds dre/dim[(s*K + t)*r + j]
  // to w_j relative to the slot base.
  for (int s = 0; s < nslots; ++s) {
    const Slot& slot = ws.slots[static_cast<std::size_t>(s)];
    const int i = slot.coord;
    const int b0 = slot.choice(0);
    for (int t = 1; t < slot.count; ++t) {
      const int bt = slot.choice(t);
      const double dzr = rootr[bt] - rootr[b0];
      const double dzi = rooti[bt] - rooti[b0];
      for (int j = 0; j < r; ++j) {
        const double vr = vre[static_cast<std::size_t>(j) * n + i];
        const double vi = vim[static_cast<std::size_t>(j) * n + i];
        const std::size_t at = (static_cast<std::size_t>(s) * K + t) * r + j;
        ws.dre[at] = vr * dzr + vi * dzi;
        ws.dim[at] = vr * dzi - vi * dzr;
      }
    }
  }
  ws.idx.assign(static_cast<std::size_t>(nslots), 0);
  while (true) {
    double obj = 0.0;
    for (int j = 0; j < r; ++j) {
      double tr = wr[j], ti = wi[j];
      for (int s = 0; s < nslots; ++s) {
        const int t = ws.idx[static_cast<std::size_t>(s)];
        if (t == 0) continue;
        const std::size_t at = (static_cast<std::size_t>(s) * K + t) * r + j;
        tr += ws.dre[at];
        ti += ws.dim[at];
      }
      obj += tr * tr + ti * ti;
    }
    if (!acc.best.valid || obj >= acc.best.objective) {
      ws.labels = base;
      for (int s = 0; s < nslots; ++s) {
        const Slot& slot = ws.slots[static_cast<std::size_t>(s)];
        ws.labels[static_cast<std::size_t>(slot.coord)] =
            slot.choice(ws.idx[static_cast<std::size_t>(s)]);
      }
      acc.best.offer(obj, ws.labels, K);
    }
    // Odometer over the slots, rightmost fastest.
    int s = nslots;
    while (true) {
      if (s == 0) return;
      --s;
      if (++ws.idx[static_cast<std::size_t>(s)] <
          ws.slots[static_cast<std::size_t>(s)].count) {
        break;
      }
      ws.idx[static_cast<std::size_t>(s)] = 0;
    }
  }
}

void race_fallback(const EngineContext& ctx, VertexWorkspace& ws,
                   const std::vector<int>& I, int sign, BatchAccum& acc) {
  Rng rng(perturbation_seed(I, sign));
  const double scale = 1e-3;
  Eigen::VectorXcd cp(ctx.r);
  for (int t = 0; t < kFallbackPerturbations; ++t) {
    for (int j = 0; j < ctx.r; ++j) {
      cp(j) = ws.c(j) + scale * Cplx(rng.normal(), rng.normal());
    }
    if (sign < 0) cp = -cp;
    ws.alpha.noalias() = *ctx.V * cp;
    strict_labels(ws.alpha, ctx.row_norms2, ctx.alphabet->roots, ws.labels);
    for (int i = 0; i < ctx.n; ++i) {
      ws.z(i) = ctx.alphabet->roots[static_cast<std::size_t>(
          ws.labels[static_cast<std::size_t>(i)])];
    }
    acc.best.offer((ctx.V->adjoint() * ws.z).squaredNorm(), ws.labels, ctx.K);
  }
}

void process_vertex(const EngineContext& ctx, VertexWorkspace& ws,
                    const std::vector<int>& I, BatchAccum& acc) {
  double resid = 0.0, norm_err = 0.0;
  if (!solve_nullvector(*ctx.sys, I, ws.ns, resid, norm_err)) return;
  ++acc.accepted;
  acc.max_residual = std::max(acc.max_residual, resid);
  acc.max_norm_err = std::max(acc.max_norm_err, norm_err);

  const int r = ctx.r;
  for (int j = 0; j < r; ++j) {
    ws.cre[static_cast<std::size_t>(j)] = ws.ns.c_tilde(r + j);
    ws.cim[static_cast<std::size_t>(j)] = ws.ns.c_tilde(j);
    ws.c(j) = Cplx(ws.ns.c_tilde(r + j), ws.ns.c_tilde(j));
  }
  ws.ntouched = touched_groups(I, ctx.n, ws.touched.data());
  if (r == 2 && ctx.K == 3) {
    fused_pass<2, 3>(ctx, ws);
  } else {
    fused_pass<0, 0>(ctx, ws);
  }

  const auto alpha_of = [&](bool neg) {
    return [&ctx, &ws, neg](int i) {
      double ar = 0.0, ai = 0.0;
      for (int j = 0; j < ctx.r; ++j) {
        const double vr = ctx.vre[static_cast<std::size_t>(j) * ctx.n + i];
        const double vi = ctx.vim[static_cast<std::size_t>(j) * ctx.n + i];
        ar += vr * ws.cre[static_cast<std::size_t>(j)] -
              vi * ws.cim[static_cast<std::size_t>(j)];
        ai += vr * ws.cim[static_cast<std::size_t>(j)] +
              vi * ws.cre[static_cast<std::size_t>(j)];
      }
      return neg ? Cplx(-ar, -ai) : Cplx(ar, ai);
    };
  };

  if (build_slots(alpha_of(false), ws.touched.data(), ws.ntouched,
                  ctx.sys->rotations, ctx.K, ws.slots.data(),
                  ws.nslots) < 0) {
    race_fallback(ctx, ws, I, +1, acc);
  } else {
    race_combos(ctx, ws, false, acc);
  }
  // For even K the negated direction is a root rotation of the positive one
  // and yields the same assignments up to a global label shift; skip it.
  if (ctx.K % 2 == 1) {
    if (build_slots(alpha_of(true), ws.touched.data(), ws.ntouched,
                    ctx.sys->rotations, ctx.K, ws.slots.data(),
                    ws.nslots) < 0) {
      race_fallback(ctx, ws, I, -1, acc);
    } else {
      race_combos(ctx, ws, true, acc);
    }
  }
}

} // namespace

AugmentedSystem build_augmented(const Eigen::MatrixXcd& V, int K) {
  const Alphabet alphabet = make_alphabet(K);
  AugmentedSystem sys;
  sys.n = static_cast<int>(V.rows());
  sys.r = static_cast<int>(V.cols());
  sys.K = K;
  sys.b_k = alphabet.b_k;
  sys.rotations.resize(static_cast<std::size_t>(sys.b_k));
  sys.rows.resize(sys.n * sys.b_k, 2 * sys.r);
  for (int m = 0; m < sys.b_k; ++m) {
    const double th = alphabet.boundary_angles[static_cast<std::size_t>(m)];
    const Cplx rho(std::cos(th), -std::sin(th));
    sys.rotations[static_cast<std::size_t>(m)] = rho;
    for (int i = 0; i < sys.n; ++i) {
      for (int j = 0; j < sys.r; ++j) {
        const Cplx v = rho * V(i, j);
        sys.rows(m * sys.n + i, j) = v.real();
        sys.rows(m * sys.n + i, sys.r + j) = v.imag();
      }
    }
  }
  return sys;
}

Eigen::VectorXcd complex_direction(const Eigen::VectorXd& c_tilde, int r) {
  if (c_tilde.size() != 2 * r) {
    throw std::invalid_argument("c_tilde must have length 2r");
  }
  Eigen::VectorXcd c(r);
  for (int j = 0; j < r; ++j) {
    c(j) = Cplx(c_tilde(r + j), c_tilde(j));
  }
  return c;
}

IndexSetStream::IndexSetStream(int row_count, int group_count, int size)
    : rows_(row_count), groups_(group_count), size_(size),
      usage_(static_cast<std::size_t>(std::max(1, group_count)), 0) {
  if (size_ < 1 || size_ > rows_ || groups_ < 1) done_ = true;
}

bool IndexSetStream::next(std::vector<int>& out) {
  if (done_) return false;
  int depth, j;
  if (!started_) {
    started_ = true;
    cur_.assign(static_cast<std::size_t>(size_), 0);
    depth = 0;
    j = 0;
  } else {
    depth = size_ - 1;
    j = cur_[static_cast<std::size_t>(depth)];
    --usage_[static_cast<std::size_t>(j % groups_)];
    ++j;
  }
  // Invariant: positions before `depth` are placed and counted in usage_;
  // position `depth` is being chosen, candidate j.
  while (true) {
    if (j > rows_ - (size_ - depth)) {
      if (--depth < 0) {
        done_ = true;
        return false;
      }
      j = cur_[static_cast<std::size_t>(depth)];
      --usage_[static_cast<std::size_t>(j % groups_)];
      ++j;
      continue;
    }
    auto& u = usage_[static_cast<std::size_t>(j % groups_)];
    if (u < 2) {
      ++u;
      cur_[static_cast<std::size_t>(depth)] = j;
      if (++depth == size_) {
        out = cur_;
        return true;
      }
    }
    ++j;
  }
}

IndexSetStream stream_valid_index_sets(const AugmentedSystem& sys) {
  return IndexSetStream(sys.row_count(), sys.n, 2 * sys.r - 1);
}

std::optional<Eigen::VectorXd> vertex_nullvector(const AugmentedSystem& sys,
                                                 const std::vector<int>& I) {
  if (static_cast<int>(I.size()) != 2 * sys.r - 1) {
    throw std::invalid_argument("index set must have 2r-1 rows");
  }
  NullScratch ns;
  double resid = 0.0, norm_err = 0.0;
  if (!solve_nullvector(sys, I, ns, resid, norm_err)) return std::nullopt;
  return std::move(ns.c_tilde);
}

std::vector<Assignment> expand_vertex(const Eigen::MatrixXcd& V,
                                      const Eigen::VectorXcd& c,
                                      const std::vector<int>& I,
                                      const AugmentedSystem& sys) {
  const int n = static_cast<int>(V.rows());
  const int K = sys.K;
  const Alphabet alphabet = make_alphabet(K);
  std::vector<double> row_norms2(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    row_norms2[static_cast<std::size_t>(i)] = V.row(i).squaredNorm();
  }
  const Eigen::VectorXcd a = V * c;

  std::vector<int> base;
  strict_labels(a, row_norms2, alphabet.roots, base);
  std::vector<Touched> touched(I.size());
  const int ntouched = touched_groups(I, n, touched.data());
  std::vector<Slot> slots(I.size());
  int nslots = 0;
  const auto alpha_at = [&a](int i) { return a(i); };
  std::vector<Assignment> out;
  if (build_slots(alpha_at, touched.data(), ntouched, sys.rotations, K,
                  slots.data(), nslots) < 0) {
    // Cartesian blow-up: sample the cells around the vertex instead.
    Rng rng(perturbation_seed(I, +1));
    std::vector<int> labels;
    Eigen::VectorXcd cp(c.size());
    for (int t = 0; t < kFallbackPerturbations; ++t) {
      for (int j = 0; j < c.size(); ++j) {
        cp(j) = c(j) + 1e-3 * Cplx(rng.normal(), rng.normal());
      }
      strict_labels(V * cp, row_norms2, alphabet.roots, labels);
      out.emplace_back(labels, K);
    }
    return out;
  }
  std::vector<int> idx(static_cast<std::size_t>(nslots), 0);
  std::vector<int> labels = base;
  while (true) {
    for (int s = 0; s < nslots; ++s) {
      labels[static_cast<std::size_t>(slots[static_cast<std::size_t>(s)]
                                          .coord)] =
          slots[static_cast<std::size_t>(s)].choice(
              idx[static_cast<std::size_t>(s)]);
    }
    out.emplace_back(labels, K);
    int s = nslots;
    while (true) {
      if (s == 0) return out;
      --s;
      if (++idx[static_cast<std::size_t>(s)] <
          slots[static_cast<std::size_t>(s)].count) {
        break;
      }
      idx[static_cast<std::size_t>(s)] = 0;
    }
  }
}

RankRResult maximize_rankr(const Eigen::MatrixXcd& V, int K,
                           const ParallelConfig& par,
                           const Deadline& deadline) {
  const int n = static_cast<int>(V.rows());
  const int r = static_cast<int>(V.cols());
  if (n < 1 || r < 1) {
    throw std::invalid_argument("maximize_rankr requires n >= 1 and r >= 1");
  }
  if (r == 1) {
    const Rank1Result base = maximize_rank1(V.col(0), K, par, deadline);
    RankRResult out;
    out.assignment = base.assignment;
    out.factor_objective = base.factor_objective;
    out.candidates = base.candidates;
    out.timed_out = base.timed_out;
    return out;
  }
  const Alphabet alphabet = make_alphabet(K);
  const int rows = n * alphabet.b_k;
  const int size = 2 * r - 1;
  if (size > rows) {
    throw std::invalid_argument(
        "rank too large: 2r-1 exceeds the augmented row count");
  }

  // The leading r-1 columns are solved first; their winner joins the race
  // re-scored under the full factor.
  const RankRResult child = maximize_rankr(V.leftCols(r - 1), K, par, deadline);

  const AugmentedSystem sys = build_augmented(V, K);
  EngineContext ctx;
  ctx.V = &V;
  ctx.sys = &sys;
  ctx.alphabet = &alphabet;
  ctx.mirror();

  // Batches are ranges of the leading row index, sized so that the estimated
  // number of index sets per batch tracks the batch policy.
  const int max_lead = rows - size;
  std::vector<std::pair<int, int>> ranges;
  {
    const double total = binom(rows, size);
    const double target = static_cast<double>(par.batch_size_for(
        static_cast<std::int64_t>(std::min(total, 9.0e18))));
    double est = 0.0;
    int start = 0;
    for (int v = 0; v <= max_lead; ++v) {
      est += binom(rows - 1 - v, size - 1);
      if (est >= target || v == max_lead) {
        ranges.emplace_back(start, v + 1);
        start = v + 1;
        est = 0.0;
      }
    }
  }

  std::vector<BatchAccum> results(ranges.size());
  std::atomic<bool> stop{false};

  auto run_range = [&](std::int64_t b) {
    if (deadline.expired()) {
      stop.store(true, std::memory_order_relaxed);
      return;
    }
    BatchAccum& acc = results[static_cast<std::size_t>(b)];
    VertexWorkspace ws;
    ws.init(n, r, K, size);
    std::vector<int> I(static_cast<std::size_t>(size));
    std::vector<int> usage(static_cast<std::size_t>(n), 0);
    int since_check = 0;

    auto walk = [&](auto&& self, int depth, int start_row) -> bool {
      if (depth == size) {
        if (++since_check >= 4096) {
          since_check = 0;
          if (deadline.expired()) {
            stop.store(true, std::memory_order_relaxed);
            return false;
          }
        }
        process_vertex(ctx, ws, I, acc);
        return true;
      }
      for (int j = start_row; j <= rows - (size - depth); ++j) {
        auto& u = usage[static_cast<std::size_t>(j % n)];
        if (u == 2) continue;
        ++u;
        I[static_cast<std::size_t>(depth)] = j;
        const bool cont = self(self, depth + 1, j + 1);
        --u;
        if (!cont) return false;
      }
      return true;
    };

    const auto [lo, hi] = ranges[static_cast<std::size_t>(b)];
    for (int lead = lo; lead < hi; ++lead) {
      auto& u = usage[static_cast<std::size_t>(lead % n)];
      ++u;
      I[0] = lead;
      const bool cont = walk(walk, 1, lead + 1);
      --u;
      if (!cont) break;
    }
  };

  run_batches(static_cast<std::int64_t>(ranges.size()), par.workers, stop,
              run_range);

  RankRResult out;
  out.timed_out = stop.load() || child.timed_out;
  out.candidates = child.candidates;
  Contender winner;
  winner.offer(factor_quadratic_form(V, child.assignment),
               child.assignment.labels, K);
  for (const auto& acc : results) {
    out.candidates += acc.accepted;
    out.max_vertex_residual =
        std::max(out.max_vertex_residual, acc.max_residual);
    out.max_unit_norm_error =
        std::max(out.max_unit_norm_error, acc.max_norm_err);
    winner.merge(acc.best);
  }
  out.assignment = Assignment(std::move(winner.canonical), K);
  out.factor_objective = winner.objective;
  return out;
}

RankRSolution solve_rankr(const HermitianOperand& Q, const Eigen::MatrixXcd& V,
                          int r, int K, const ParallelConfig& par,
                          const Deadline& deadline) {
  if (V.cols() != r) {
    throw std::invalid_argument("factor must have exactly r columns");
  }
  if (Q.n() != V.rows()) {
    throw std::invalid_argument("factor dimension does not match operand");
  }
  const RankRResult res = maximize_rankr(V, K, par, deadline);
  RankRSolution out;
  out.assignment = res.assignment;
  out.objective = quadratic_form(Q, res.assignment);
  out.candidates = res.candidates;
  out.timed_out = res.timed_out;
  out.max_vertex_residual = res.max_vertex_residual;
  out.max_unit_norm_error = res.max_unit_norm_error;
  return out;
}

std::uint64_t candidate_count_bound(int n, int r, int K) {
  if (n < 1 || r < 1) {
    throw std::invalid_argument("candidate_count_bound requires n, r >= 1");
  }
  const Alphabet alphabet = make_alphabet(K);
  const double B = alphabet.b_k;
  double closed = 0.0, stepwise = 0.0;
  for (int d = 1; d <= r; ++d) {
    for (int i = 0; i < d; ++i) {
      const int singles = 2 * (d - i) - 1;
      const double shared =
          binom(n, i) * binom(n - i, singles) * std::pow(B - 1.0, i);
      closed += shared * std::pow(B, singles - 1);
      stepwise += shared * std::pow(B, singles) * std::pow(binom(B, 2), i);
    }
  }
  const double v = std::max(closed, stepwise);
  if (v >= static_cast<double>(std::numeric_limits<std::uint64_t>::max())) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(v);
}

} // namespace kcut
