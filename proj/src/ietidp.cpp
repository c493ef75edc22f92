#include "ietidp/ietidp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace ietidp {

char algorithm_tag(Algorithm a) {
  switch (a) {
    case Algorithm::A: return 'A';
    case Algorithm::B: return 'B';
    case Algorithm::C: return 'C';
  }
  return '?';
}

std::optional<Algorithm> algorithm_from_tag(std::string_view tag) {
  if (tag == "A" || tag == "a") return Algorithm::A;
  if (tag == "B" || tag == "b") return Algorithm::B;
  if (tag == "C" || tag == "c") return Algorithm::C;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Skeleton matching

namespace {

Eigen::VectorXd all_basis_values(const KnotVector& kv, double t) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(kv.size());
  const auto b = eval_basis(kv, t);
  out.segment(b.first_active, b.values.size()) = b.values;
  return out;
}

}  // namespace

SkeletonIndex build_skeleton_index(const MultiPatchDomain& domain, const std::vector<PatchDiscretization>& discs) {
  const int K = domain.num_patches();
  if (static_cast<int>(discs.size()) != K) throw ArgumentError("build_skeleton_index: one discretization per patch");
  SkeletonIndex sk;
  sk.offsets.assign(K + 1, 0);
  for (int k = 0; k < K; ++k) sk.offsets[k + 1] = sk.offsets[k] + discs[k].n_skeleton;

  for (int i = 0; i < static_cast<int>(domain.interfaces.size()); ++i) {
    const auto& f = domain.interfaces[i];
    const auto& da = discs[f.patch_a];
    const auto& db = discs[f.patch_b];
    const auto ta = da.side_tensor_indices(f.side_a);
    const auto tb = db.side_tensor_indices(f.side_b);
    const int n = static_cast<int>(ta.size());
    if (static_cast<int>(tb.size()) != n)
      throw TopologyError("interface " + std::to_string(i) + ": sides carry different numbers of basis functions");

    // Re-check that paired trace functions coincide.
    const auto& ka = side_knots(da.space, f.side_a);
    const auto& kb = side_knots(db.space, f.side_b);
    const int samples = ka.degree() + 2;
    for (int s = 0; s < samples; ++s) {
      const double t = (s + 0.5) / samples;
      const Eigen::VectorXd va = all_basis_values(ka, t);
      Eigen::VectorXd vb = all_basis_values(kb, f.reversed ? 1.0 - t : t);
      if (f.reversed) vb.reverseInPlace();
      if ((va - vb).cwiseAbs().maxCoeff() > 1e-9)
        throw TopologyError("interface " + std::to_string(i) + ": trace basis functions do not match");
    }

    SkeletonIndex::EdgePairs edge;
    for (int t = 0; t < n; ++t) {
      const int ia = da.skeleton_index(ta[t]);
      const int ib = db.skeleton_index(tb[f.reversed ? n - 1 - t : t]);
      if ((ia < 0) != (ib < 0))
        throw TopologyError("interface " + std::to_string(i) + ": a trace dof exists on one side only");
      if (ia < 0) continue;
      edge.pairs.emplace_back(sk.offsets[f.patch_a] + ia, sk.offsets[f.patch_b] + ib);
      edge.at_corner.push_back(t == 0 || t == n - 1);
    }
    sk.edges.push_back(std::move(edge));
  }

  for (int v = 0; v < static_cast<int>(domain.vertices.size()); ++v) {
    const auto& vtx = domain.vertices[v];
    if (vtx.on_dirichlet_boundary) continue;
    SkeletonIndex::VertexDofs entry;
    entry.vertex = v;
    for (const auto& c : vtx.corners) {
      const int s = discs[c.patch].skeleton_index(discs[c.patch].corner_tensor_index(c.corner));
      if (s >= 0) entry.dofs.emplace_back(c.patch, sk.offsets[c.patch] + s);
    }
    std::sort(entry.dofs.begin(), entry.dofs.end());
    if (!entry.dofs.empty()) sk.vertices.push_back(std::move(entry));
  }
  return sk;
}

// ---------------------------------------------------------------------------
// Jump matrix and scaling

namespace {

int patch_of(const SkeletonIndex& sk, int global) {
  auto it = std::upper_bound(sk.offsets.begin(), sk.offsets.end(), global);
  return static_cast<int>(it - sk.offsets.begin()) - 1;
}

}  // namespace

JumpMatrix build_jump_matrix(const SkeletonIndex& skeleton, Algorithm algorithm) {
  std::vector<Eigen::Triplet<double>> triplets;
  int row = 0;
  auto add_row = [&](int first, int second) {
    // +1 on the dof of the lower patch id
    if (patch_of(skeleton, first) > patch_of(skeleton, second)) std::swap(first, second);
    triplets.emplace_back(row, first, 1.0);
    triplets.emplace_back(row, second, -1.0);
    ++row;
  };
  for (const auto& edge : skeleton.edges)
    for (std::size_t i = 0; i < edge.pairs.size(); ++i)
      if (!edge.at_corner[i]) add_row(edge.pairs[i].first, edge.pairs[i].second);
  const int edge_rows = row;
  if (algorithm == Algorithm::B) {
    for (const auto& v : skeleton.vertices)
      for (std::size_t a = 0; a < v.dofs.size(); ++a)
        for (std::size_t b = a + 1; b < v.dofs.size(); ++b) add_row(v.dofs[a].second, v.dofs[b].second);
  }
  JumpMatrix J;
  J.algorithm = algorithm;
  J.num_edge_rows = edge_rows;
  J.B.resize(row, skeleton.size());
  J.B.setFromTriplets(triplets.begin(), triplets.end());
  J.B.makeCompressed();
  return J;
}

Eigen::VectorXd build_scaling(const JumpMatrix& jump) {
  Eigen::VectorXd d = Eigen::VectorXd::Ones(jump.B.cols());
  for (int col = 0; col < jump.B.outerSize(); ++col) {
    double count = 0.0;
    for (SparseMatrix::InnerIterator it(jump.B, col); it; ++it) count += it.value() * it.value();
    d[col] = std::max(1.0, count);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Primal constraints

Eigen::VectorXd edge_integral_weights(const PatchDiscretization& disc, const NurbsPatchMap& G, Side side) {
  const auto& kv = side_knots(disc.space, side);
  const auto tensor = disc.side_tensor_indices(side);
  const auto rule = gauss_rule(kv.degree() + 1, kv);
  const int dir = side_direction(side);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(disc.n_skeleton);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double t = rule.nodes[q];
    const Eigen::Vector2d uv = side_point(side, t);
    const double speed = map_jacobian(G, uv.x(), uv.y()).col(dir).norm();
    const auto b = eval_basis(kv, t);
    for (int a = 0; a < b.values.size(); ++a) {
      const int s = disc.skeleton_index(tensor[b.first_active + a]);
      if (s >= 0) w[s] += rule.weights[q] * speed * b.values[a];
    }
  }
  return w;
}

PrimalConstraints build_primal_constraints(const MultiPatchDomain& domain,
                                           const std::vector<PatchDiscretization>& discs,
                                           const SkeletonIndex& skeleton, Algorithm algorithm) {
  const int K = domain.num_patches();
  PrimalConstraints pc;
  pc.vertex_primal.assign(domain.vertices.size(), -1);
  pc.edge_primal.assign(domain.interfaces.size(), -1);
  const bool use_vertices = algorithm != Algorithm::B;
  const bool use_edges = algorithm != Algorithm::A;

  if (use_vertices)
    for (const auto& v : skeleton.vertices) pc.vertex_primal[v.vertex] = pc.num_primal++;
  if (use_edges) {
    for (int i = 0; i < static_cast<int>(skeleton.edges.size()); ++i) {
      const auto& e = skeleton.edges[i];
      const bool has_interior =
          std::any_of(e.at_corner.begin(), e.at_corner.end(), [](bool corner) { return !corner; });
      // With vertex primals, an edge without interior dofs adds no independent constraint.
      const bool qualifies = algorithm == Algorithm::B ? !e.pairs.empty() : has_interior;
      if (qualifies) pc.edge_primal[i] = pc.num_primal++;
    }
  }

  pc.C.resize(K);
  pc.global_ids.resize(K);
  for (int k = 0; k < K; ++k) {
    std::vector<Eigen::VectorXd> rows;
    auto& ids = pc.global_ids[k];
    const auto& disc = discs[k];
    for (Corner c = 0; c < 4; ++c) {
      const int id = pc.vertex_primal[domain.vertex_of(k, c)];
      if (id < 0) continue;
      const int s = disc.skeleton_index(disc.corner_tensor_index(c));
      if (s < 0) continue;
      Eigen::VectorXd row = Eigen::VectorXd::Zero(disc.n_skeleton);
      row[s] = 1.0;
      rows.push_back(std::move(row));
      ids.push_back(id);
    }
    for (int i = 0; i < static_cast<int>(domain.interfaces.size()); ++i) {
      const int id = pc.edge_primal[i];
      if (id < 0) continue;
      const auto& f = domain.interfaces[i];
      if (f.patch_a == k) {
        rows.push_back(edge_integral_weights(disc, domain.patches[k], f.side_a));
        ids.push_back(id);
      }
      if (f.patch_b == k) {
        rows.push_back(edge_integral_weights(disc, domain.patches[k], f.side_b));
        ids.push_back(id);
      }
    }
    pc.C[k].resize(static_cast<Eigen::Index>(rows.size()), disc.n_skeleton);
    for (std::size_t r = 0; r < rows.size(); ++r) pc.C[k].row(r) = rows[r].transpose();

    bool floating = true;
    for (Side s : kAllSides) floating = floating && !domain.is_dirichlet(k, s);
    if (floating && rows.empty())
      throw TopologyError("patch " + std::to_string(k) + " has no Dirichlet side and no primal constraint");
  }
  return pc;
}

// ---------------------------------------------------------------------------
// Local operators

PatchSchur::PatchSchur(const PatchSystem& system)
    : A_IG_(system.A_IG), A_GI_(system.A_GI), A_GG_(system.A_GG), f_I_(system.f_I), A_II_(system.A_II) {
  g_ = system.f_G;
  if (f_I_.size() > 0) g_ -= A_GI_ * A_II_.solve(f_I_);
}

Eigen::VectorXd PatchSchur::apply(const Eigen::VectorXd& w) const {
  Eigen::VectorXd out = A_GG_ * w;
  if (A_II_.rows() > 0) out -= A_GI_ * A_II_.solve(Eigen::VectorXd(A_IG_ * w));
  return out;
}

Eigen::VectorXd PatchSchur::interior_values(const Eigen::VectorXd& w) const {
  if (A_II_.rows() == 0) return Eigen::VectorXd();
  return A_II_.solve(Eigen::VectorXd(f_I_ - A_IG_ * w));
}

LocalSaddle::LocalSaddle(const PatchSystem& system, const Eigen::MatrixXd& C)
    : n_interior_(static_cast<int>(system.A_II.rows())),
      n_skeleton_(static_cast<int>(system.A_GG.rows())),
      n_primal_(static_cast<int>(C.rows())) {
  const int n = n_interior_ + n_skeleton_;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(system.A.nonZeros() + 2 * C.size());
  for (int col = 0; col < system.A.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(system.A, col); it; ++it) triplets.emplace_back(it.row(), it.col(), it.value());
  for (int r = 0; r < C.rows(); ++r) {
    for (int c = 0; c < C.cols(); ++c) {
      if (C(r, c) == 0.0) continue;
      triplets.emplace_back(n + r, n_interior_ + c, C(r, c));
      triplets.emplace_back(n_interior_ + c, n + r, C(r, c));
    }
  }
  SparseMatrix K(n + n_primal_, n + n_primal_);
  K.setFromTriplets(triplets.begin(), triplets.end());
  factor_ = IndefiniteFactorization(K);
}

Eigen::VectorXd LocalSaddle::solve(const Eigen::VectorXd& q, const Eigen::VectorXd& c) const {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_interior_ + n_skeleton_ + n_primal_);
  rhs.segment(n_interior_, n_skeleton_) = q;
  rhs.tail(n_primal_) = c;
  return factor_.solve(rhs).segment(n_interior_, n_skeleton_);
}

Eigen::VectorXd LocalSaddle::solve(const Eigen::VectorXd& q) const {
  return solve(q, Eigen::VectorXd::Zero(n_primal_));
}

PrimalBasis build_primal_basis(const std::vector<PatchSystem>& systems, const std::vector<PatchSchur>& schurs,
                               const PrimalConstraints& constraints) {
  const int K = static_cast<int>(systems.size());
  PrimalBasis basis;
  basis.S_Pi = Eigen::MatrixXd::Zero(constraints.num_primal, constraints.num_primal);
  for (int k = 0; k < K; ++k) {
    const auto& C = constraints.C[k];
    try {
      basis.saddles.emplace_back(systems[k], C);
    } catch (const FactorizationError& e) {
      throw FactorizationError("local saddle point system of patch " + std::to_string(k) + ": " + e.what());
    }
    const int m = static_cast<int>(C.rows());
    Eigen::MatrixXd psi(C.cols(), m);
    Eigen::MatrixXd S_psi(C.cols(), m);
    for (int j = 0; j < m; ++j) {
      psi.col(j) = basis.saddles.back().solve(Eigen::VectorXd::Zero(C.cols()), Eigen::VectorXd::Unit(m, j));
      S_psi.col(j) = schurs[k].apply(psi.col(j));
    }
    const Eigen::MatrixXd local = psi.transpose() * S_psi;
    const auto& ids = constraints.global_ids[k];
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) basis.S_Pi(ids[a], ids[b]) += local(a, b);
    basis.psi.push_back(std::move(psi));
  }
  basis.S_Pi = 0.5 * (basis.S_Pi + basis.S_Pi.transpose()).eval();
  basis.S_Pi_factor.compute(basis.S_Pi);
  if (constraints.num_primal > 0 && basis.S_Pi_factor.info() != Eigen::Success)
    throw FactorizationError("coarse matrix S_Pi is not positive definite");
  return basis;
}

// ---------------------------------------------------------------------------
// The assembled method

IetiDpSystem::IetiDpSystem(const MultiPatchDomain& domain, int degree, int refinements, Algorithm algorithm,
                           const RhsFunction& rhs)
    : algorithm_(algorithm), spaces_(analysis_spaces(domain, degree, refinements)) {
  const auto report = validate_matching(domain, spaces_);
  if (!report.ok) throw TopologyError("non-matching discretization: " + report.message);
  discs_ = classify_domain(domain, spaces_);
  const int K = domain.num_patches();
  systems_.reserve(K);
  schurs_.reserve(K);
  for (int k = 0; k < K; ++k) {
    systems_.push_back(assemble_patch(discs_[k], domain.patches[k], rhs, std::nullopt, k));
    try {
      schurs_.emplace_back(systems_[k]);
    } catch (const FactorizationError& e) {
      throw FactorizationError("interior block of patch " + std::to_string(k) + ": " + e.what());
    }
  }
  skeleton_ = build_skeleton_index(domain, discs_);
  jump_ = build_jump_matrix(skeleton_, algorithm);
  Bt_ = jump_.B.transpose();
  constraints_ = build_primal_constraints(domain, discs_, skeleton_, algorithm);
  basis_ = build_primal_basis(systems_, schurs_, constraints_);
  scaling_ = build_scaling(jump_);

  g_.resize(skeleton_.size());
  for (int k = 0; k < K; ++k) g_.segment(skeleton_.offsets[k], skeleton_.patch_size(k)) = schurs_[k].g();
  d_ = jump_.B * solve_tilde(g_);
}

Eigen::VectorXd IetiDpSystem::apply_S(const Eigen::VectorXd& w) const {
  Eigen::VectorXd out(w.size());
  for (int k = 0; k < skeleton_.num_patches(); ++k) {
    const int o = skeleton_.offsets[k], n = skeleton_.patch_size(k);
    out.segment(o, n) = schurs_[k].apply(w.segment(o, n));
  }
  return out;
}

Eigen::VectorXd IetiDpSystem::apply_Psi(const Eigen::VectorXd& w_primal) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(skeleton_.size());
  for (int k = 0; k < skeleton_.num_patches(); ++k) {
    const auto& ids = constraints_.global_ids[k];
    Eigen::VectorXd local(ids.size());
    for (std::size_t j = 0; j < ids.size(); ++j) local[j] = w_primal[ids[j]];
    out.segment(skeleton_.offsets[k], skeleton_.patch_size(k)) = basis_.psi[k] * local;
  }
  return out;
}

Eigen::VectorXd IetiDpSystem::apply_Psi_transpose(const Eigen::VectorXd& w) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(constraints_.num_primal);
  for (int k = 0; k < skeleton_.num_patches(); ++k) {
    const Eigen::VectorXd local =
        basis_.psi[k].transpose() * w.segment(skeleton_.offsets[k], skeleton_.patch_size(k));
    const auto& ids = constraints_.global_ids[k];
    for (std::size_t j = 0; j < ids.size(); ++j) out[ids[j]] += local[j];
  }
  return out;
}

Eigen::VectorXd IetiDpSystem::solve_tilde(const Eigen::VectorXd& q) const {
  Eigen::VectorXd w(skeleton_.size());
  for (int k = 0; k < skeleton_.num_patches(); ++k) {
    const int o = skeleton_.offsets[k], n = skeleton_.patch_size(k);
    w.segment(o, n) = basis_.saddles[k].solve(q.segment(o, n));
  }
  if (constraints_.num_primal > 0) {
    const Eigen::VectorXd w_primal = basis_.S_Pi_factor.solve(apply_Psi_transpose(q));
    w += apply_Psi(w_primal);
  }
  return w;
}

Eigen::VectorXd IetiDpSystem::apply_F(const Eigen::VectorXd& lambda) const {
  return jump_.B * solve_tilde(Bt_ * lambda);
}

Eigen::VectorXd IetiDpSystem::apply_MsD(const Eigen::VectorXd& residual) const {
  Eigen::VectorXd v = (Bt_ * residual).cwiseQuotient(scaling_);
  v = apply_S(v).cwiseQuotient(scaling_);
  return jump_.B * v;
}

Eigen::VectorXd IetiDpSystem::skeleton_solution(const Eigen::VectorXd& lambda) const {
  return solve_tilde(g_ - Bt_ * lambda);
}

std::vector<Eigen::VectorXd> IetiDpSystem::recover(const Eigen::VectorXd& lambda) const {
  const Eigen::VectorXd w = skeleton_solution(lambda);
  std::vector<Eigen::VectorXd> out;
  for (int k = 0; k < skeleton_.num_patches(); ++k) {
    const auto& disc = discs_[k];
    const Eigen::VectorXd wk = w.segment(skeleton_.offsets[k], skeleton_.patch_size(k));
    const Eigen::VectorXd uI = schurs_[k].interior_values(wk);
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(disc.space.size());
    for (int l = 0; l < disc.n_interior; ++l) coeffs[disc.kept[l]] = uI[l];
    for (int l = 0; l < disc.n_skeleton; ++l) coeffs[disc.kept[disc.n_interior + l]] = wk[l];
    out.push_back(std::move(coeffs));
  }
  return out;
}

double default_rhs(const Eigen::Vector2d& x) {
  const double pi = std::acos(-1.0);
  return 2.0 * pi * pi * std::sin(pi * x.x()) * std::sin(pi * x.y());
}

Eigen::VectorXd random_start(int size, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd x(size);
  for (int i = 0; i < size; ++i) x[i] = dist(gen);
  return x;
}

SolveResult solve(const MultiPatchDomain& domain, const SolveOptions& options) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [](clock::time_point since) {
    return std::chrono::duration<double>(clock::now() - since).count();
  };
  auto check_budget = [&]() {
    if (options.time_budget_seconds && elapsed(start) > *options.time_budget_seconds)
      throw TimeBudgetExceeded("wall-time budget of " + format_double(*options.time_budget_seconds) +
                               " s exceeded");
  };

  IetiDpSystem system(domain, options.degree, options.refinements, options.algorithm, options.rhs);
  SolveResult result;
  auto& rep = result.report;
  rep.algorithm = options.algorithm;
  rep.degree = options.degree;
  rep.refinements = options.refinements;
  rep.seed = options.seed;
  rep.num_multipliers = system.num_multipliers();
  rep.num_primal = system.num_primal();
  rep.setup_seconds = elapsed(start);
  check_budget();

  const auto pcg_start = clock::now();
  const Eigen::VectorXd lambda0 = random_start(system.num_multipliers(), options.seed);
  // When the primal constraints already fix every multiplier-coupled dof, F vanishes and the
  // start residual is pure roundoff: the jumps of the first iterate are negligible.
  const Eigen::VectorXd r0 = system.d() - system.apply_F(lambda0);
  const Eigen::VectorXd w0 = system.solve_tilde(system.g() - system.jump().B.transpose() * lambda0);
  if (r0.norm() <= 1e-12 * w0.norm()) {
    rep.pcg_seconds = elapsed(pcg_start);
    rep.converged = true;
    rep.residual_history = {0.0};
    result.coefficients = system.recover(lambda0);
    return result;
  }
  const auto outcome = pcg(
      [&](const Eigen::VectorXd& x) {
        check_budget();
        return system.apply_F(x);
      },
      [&](const Eigen::VectorXd& r) { return system.apply_MsD(r); }, system.d(), lambda0,
      PcgOptions{options.rel_tol, options.max_iter});
  rep.pcg_seconds = elapsed(pcg_start);
  rep.converged = outcome.converged;
  rep.iterations = outcome.iterations;
  rep.kappa = outcome.kappa;
  rep.lambda_min = outcome.lambda_min;
  rep.lambda_max = outcome.lambda_max;
  rep.residual_history = outcome.residual_history;

  const auto rec_start = clock::now();
  result.coefficients = system.recover(outcome.solution);
  rep.recovery_seconds = elapsed(rec_start);
  return result;
}

// ---------------------------------------------------------------------------
// Conforming global solve

namespace {

struct DofMerge {
  std::vector<int> parent;
  explicit DofMerge(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<Eigen::VectorXd> solve_global_oracle(const MultiPatchDomain& domain, int degree, int refinements,
                                                 const RhsFunction& rhs) {
  const auto spaces = analysis_spaces(domain, degree, refinements);
  const auto report = validate_matching(domain, spaces);
  if (!report.ok) throw TopologyError("non-matching discretization: " + report.message);
  const auto discs = classify_domain(domain, spaces);
  const int K = domain.num_patches();

  std::vector<int> offset(K + 1, 0);
  for (int k = 0; k < K; ++k) offset[k + 1] = offset[k] + discs[k].size();

  // Identify coincident trace functions directly from the side orientation.
  DofMerge merge(offset[K]);
  for (const auto& f : domain.interfaces) {
    const auto ta = discs[f.patch_a].side_tensor_indices(f.side_a);
    const auto tb = discs[f.patch_b].side_tensor_indices(f.side_b);
    const int n = static_cast<int>(ta.size());
    for (int t = 0; t < n; ++t) {
      const int la = discs[f.patch_a].tensor_to_local[ta[t]];
      const int lb = discs[f.patch_b].tensor_to_local[tb[f.reversed ? n - 1 - t : t]];
      if (la >= 0 && lb >= 0) merge.unite(offset[f.patch_a] + la, offset[f.patch_b] + lb);
    }
  }
  std::vector<int> global(offset[K], -1);
  int n_global = 0;
  for (int i = 0; i < offset[K]; ++i) {
    const int root = merge.find(i);
    if (global[root] < 0) global[root] = n_global++;
    global[i] = global[root];
  }

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(n_global);
  for (int k = 0; k < K; ++k) {
    const auto sys = assemble_patch(discs[k], domain.patches[k], rhs, std::nullopt, k);
    for (int col = 0; col < sys.A.outerSize(); ++col)
      for (SparseMatrix::InnerIterator it(sys.A, col); it; ++it)
        triplets.emplace_back(global[offset[k] + it.row()], global[offset[k] + it.col()], it.value());
    for (int l = 0; l < discs[k].size(); ++l) load[global[offset[k] + l]] += sys.f[l];
  }
  SparseMatrix A(n_global, n_global);
  A.setFromTriplets(triplets.begin(), triplets.end());
  const Eigen::VectorXd u = factor_spd(A).solve(load);

  std::vector<Eigen::VectorXd> out;
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(discs[k].space.size());
    for (int l = 0; l < discs[k].size(); ++l) coeffs[discs[k].kept[l]] = u[global[offset[k] + l]];
    out.push_back(std::move(coeffs));
  }
  return out;
}

double energy_norm(const std::vector<PatchDiscretization>& discs, const std::vector<PatchSystem>& systems,
                   const std::vector<Eigen::VectorXd>& coefficients) {
  double sum = 0.0;
  for (std::size_t k = 0; k < discs.size(); ++k) {
    Eigen::VectorXd local(discs[k].size());
    for (int l = 0; l < discs[k].size(); ++l) local[l] = coefficients[k][discs[k].kept[l]];
    sum += local.dot(systems[k].A * local);
  }
  return std::sqrt(std::max(0.0, sum));
}

double relative_energy_error(const std::vector<PatchDiscretization>& discs, const std::vector<PatchSystem>& systems,
                             const std::vector<Eigen::VectorXd>& u, const std::vector<Eigen::VectorXd>& reference) {
  std::vector<Eigen::VectorXd> diff(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) diff[k] = u[k] - reference[k];
  return energy_norm(discs, systems, diff) / energy_norm(discs, systems, reference);
}

}  // namespace ietidp
