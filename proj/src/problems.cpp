#include "proxeps/problems.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "proxeps/rng.hpp"

namespace proxeps {

double operator_norm_estimate(const LinearOperator& op, int dim, int iterations) {
    Vector v = Vector::Ones(dim) / std::sqrt(static_cast<double>(dim));
    double lambda = 0;
    for (int i = 0; i < iterations; ++i) {
        Vector w = op.adjoint(op.apply(v));
        double n = w.norm();
        if (n == 0) return 0;
        lambda = n;  // estimate of ||A||^2
        v = w / n;
    }
    return std::sqrt(lambda) * (1.0 + 1e-8);
}

static double sym_norm_estimate(const Matrix& A, int iterations = 200) {
    Vector v = Vector::Ones(A.cols()) / std::sqrt(static_cast<double>(A.cols()));
    double lambda = 0;
    for (int i = 0; i < iterations; ++i) {
        Vector w = A * v;
        double n = w.norm();
        if (n == 0) return 0;
        lambda = n;
        v = w / n;
    }
    return lambda * (1.0 + 1e-8);
}

ProblemInstance make_lasso(int n, std::uint64_t seed, bool with_reference,
                           int reference_iterations) {
    if (n < 1) throw std::invalid_argument("make_lasso: n must be >= 1");
    Rng rng(seed);
    Matrix M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = rng.normal();
    Matrix A = M.transpose() * M;
    Vector b = Vector::Ones(n);

    ProblemInstance prob;
    prob.seed = seed;
    auto oracle_rng = std::make_shared<Rng>(seed ^ 0x9e3779b97f4a7c15ULL);
    prob.f = make_least_squares_oracle(A, b, oracle_rng);
    double normA = sym_norm_estimate(A);
    prob.L = normA * normA;  // ||A^T A|| for symmetric A
    prob.f.lipschitz = prob.L;
    prob.g = make_l1_oracle(oracle_rng);
    prob.C = FeasibleSet::whole_space();
    prob.x0 = Vector::Ones(n);
    prob.exact_prox_g = [](double alpha, const Vector& z) { return prox_l1(alpha, z); };
    prob.subgrad_g = prob.g.subgradient;
    prob.min_residual_subgrad_g = [](const Vector& x, const Vector& u) {
        Vector w(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
            w[i] = x[i] > 0 ? 1.0 : (x[i] < 0 ? -1.0 : std::clamp(-u[i], -1.0, 1.0));
        return w;
    };
    prob.membership_g = [](const Vector& x, const Vector& v, double eps) {
        return l1_membership(x, v, eps);
    };
    prob.prox_g = [](double alpha, const Vector& y, const ProxCriterion& crit, int max_inner,
                     const AccelProxContext* ctx, Vector*) {
        int samples = std::max(2, std::min(max_inner, 32));
        if (crit.kind == ProxCriterion::Kind::RAbsolute && crit.param == 0) {
            ProxCertificate cert;
            cert.criterion = crit;
            cert.x_bar = prox_l1(alpha, y);
            cert.w_bar = (y - cert.x_bar) / alpha;
            cert.eps_bar = 0;
            cert.lhs = 0;
            cert.rhs = 0;
            cert.inner_iterations = 1;
            return cert;
        }
        return solve_prox_l1(alpha, y, crit, ctx, samples);
    };
    if (with_reference) prob.reference = reference_solve(prob, reference_iterations);
    return prob;
}

ProblemInstance make_toy1d(std::uint64_t seed) {
    ProblemInstance prob = make_lasso(1, seed, false);
    // overwrite the random instance with the analytic one:
    // f(x) = 1/2 (x - 2)^2, g(x) = |x|
    Matrix A = Matrix::Identity(1, 1);
    Vector b(1);
    b[0] = 2.0;
    auto oracle_rng = std::make_shared<Rng>(seed ^ 0x9e3779b97f4a7c15ULL);
    prob.f = make_least_squares_oracle(A, b, oracle_rng);
    prob.L = 1.0;
    prob.f.lipschitz = 1.0;
    prob.x0 = Vector::Constant(1, 3.0);
    Reference ref;
    ref.x_star = prox_l1(1.0, b);  // minimizer of the composite objective
    ref.s_star = prob.objective(ref.x_star);
    ref.d0 = (prob.x0 - ref.x_star).norm();
    ref.trusted = true;
    prob.reference = ref;
    return prob;
}

LinearOperator gaussian_blur(int N, int kernel_size, double std_dev) {
    if (kernel_size < 1) throw std::invalid_argument("gaussian_blur: kernel_size must be >= 1");
    if (!(std_dev > 0)) throw std::invalid_argument("gaussian_blur: std_dev must be positive");
    // An even stencil has no integer center; averaging its four integer
    // placements centers it between pixels and produces a symmetric odd
    // stencil, which keeps the reflected convolution matrix symmetric with
    // spectrum in [-1, 1].
    const double mid = (kernel_size - 1) / 2.0;
    const int m = kernel_size % 2 == 1 ? kernel_size : kernel_size + 1;
    const int c = m / 2;
    Matrix k = Matrix::Zero(m, m);
    for (int i = 0; i < kernel_size; ++i)
        for (int j = 0; j < kernel_size; ++j) {
            double d2 = (i - mid) * (i - mid) + (j - mid) * (j - mid);
            double w = std::exp(-d2 / (2.0 * std_dev * std_dev));
            if (kernel_size % 2 == 1) {
                k(i, j) += w;
            } else {
                k(i, j) += 0.25 * w;
                k(i + 1, j) += 0.25 * w;
                k(i, j + 1) += 0.25 * w;
                k(i + 1, j + 1) += 0.25 * w;
            }
        }
    k /= k.sum();
    const int ks = m;

    auto reflect = [N](int i) {
        while (i < 0 || i >= N) {
            if (i < 0) i = -i - 1;
            if (i >= N) i = 2 * N - i - 1;
        }
        return i;
    };

    LinearOperator op;
    op.apply = [N, ks, c, k, reflect](const Vector& x) {
        if (x.size() != static_cast<Eigen::Index>(N) * N)
            throw std::invalid_argument("gaussian_blur: shape mismatch");
        Vector out = Vector::Zero(N * N);
        for (int r = 0; r < N; ++r)
            for (int s = 0; s < N; ++s) {
                double acc = 0;
                for (int i = 0; i < ks; ++i)
                    for (int j = 0; j < ks; ++j)
                        acc += k(i, j) * x[reflect(r + i - c) * N + reflect(s + j - c)];
                out[r * N + s] = acc;
            }
        return out;
    };
    op.adjoint = [N, ks, c, k, reflect](const Vector& y) {
        if (y.size() != static_cast<Eigen::Index>(N) * N)
            throw std::invalid_argument("gaussian_blur adjoint: shape mismatch");
        Vector out = Vector::Zero(N * N);
        for (int r = 0; r < N; ++r)
            for (int s = 0; s < N; ++s) {
                double v = y[r * N + s];
                for (int i = 0; i < ks; ++i)
                    for (int j = 0; j < ks; ++j)
                        out[reflect(r + i - c) * N + reflect(s + j - c)] += k(i, j) * v;
            }
        return out;
    };
    // the symmetric nonnegative stencil sums to 1, so the spectral norm is
    // exactly 1 (the constant image is the top eigenvector); the power
    // iteration only refines below that
    op.operator_norm_bound = std::min(operator_norm_estimate(op, N * N, 60), 1.0);
    return op;
}

static Vector synthetic_piecewise_image(int N, Rng& rng) {
    Vector x = Vector::Constant(N * N, 0.2);
    for (int block = 0; block < 3; ++block) {
        int r0 = static_cast<int>(rng.uniform(0, N * 0.7));
        int c0 = static_cast<int>(rng.uniform(0, N * 0.7));
        int h = 1 + static_cast<int>(rng.uniform(0, N * 0.4));
        int w = 1 + static_cast<int>(rng.uniform(0, N * 0.4));
        double val = rng.uniform(0.3, 1.0);
        for (int r = r0; r < std::min(N, r0 + h); ++r)
            for (int s = c0; s < std::min(N, c0 + w); ++s) x[r * N + s] = val;
    }
    return x;
}

ProblemInstance make_tv_deblur(int N, double tau, double noise_std, std::uint64_t seed,
                               bool with_reference, int reference_iterations,
                               const Vector* image) {
    if (N < 4) throw std::invalid_argument("make_tv_deblur: N must be >= 4");
    Rng rng(seed);
    Vector x_true = image != nullptr ? *image : synthetic_piecewise_image(N, rng);
    if (x_true.size() != static_cast<Eigen::Index>(N) * N)
        throw std::invalid_argument("make_tv_deblur: image shape mismatch");

    auto blur = std::make_shared<LinearOperator>(gaussian_blur(N, 4, 2.0));
    Vector b = blur->apply(x_true);
    if (noise_std > 0)
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] += noise_std * rng.normal();

    ProblemInstance prob;
    prob.seed = seed;
    prob.rows = prob.cols = N;
    auto bp = std::make_shared<Vector>(b);
    prob.f.is_smooth = true;
    prob.f.value = [blur, bp](const Vector& x) {
        return 0.5 * (blur->apply(x) - *bp).squaredNorm();
    };
    prob.f.gradient = [blur, bp](const Vector& x) {
        return blur->adjoint(blur->apply(x) - *bp);
    };
    prob.f.subgradient = prob.f.gradient;
    double nb = blur->operator_norm_bound;
    prob.L = nb * nb;
    prob.f.lipschitz = prob.L;
    prob.g = make_tv_oracle(N, N, tau);
    prob.C = FeasibleSet::whole_space();
    prob.x0 = b;
    prob.subgrad_g = prob.g.subgradient;
    prob.prox_g = [N, tau](double alpha, const Vector& y, const ProxCriterion& crit,
                           int max_inner, const AccelProxContext* ctx, Vector* warm) {
        return solve_prox_tv_dual(alpha, y, tau, N, N, crit, max_inner, ctx, warm);
    };
    if (with_reference) prob.reference = reference_solve(prob, reference_iterations);
    return prob;
}

// Monotone FISTA with the tightest available prox; falls back to a
// diminishing-step proximal subgradient loop when f is nonsmooth or C is
// constrained.
Reference reference_solve(const ProblemInstance& problem, int iterations, double inner_tol) {
    Reference ref;
    const bool smooth_unconstrained =
        problem.f.is_smooth && problem.L && problem.C.kind() == FeasibleSet::Kind::WholeSpace;

    auto tight_prox = [&](double alpha, const Vector& y) -> Vector {
        if (problem.exact_prox_g) return problem.exact_prox_g(alpha, y);
        ProxCertificate cert = problem.prox_g(alpha, y, ProxCriterion::absolute_gap(1e-13),
                                              10000, nullptr, nullptr);
        return cert.x_bar;
    };

    Vector best_x = problem.x0;
    double best_val = problem.objective(best_x);
    double tail_drop = 0;

    if (smooth_unconstrained) {
        double alpha = 1.0 / *problem.L;
        Vector x = problem.x0, x_prev = problem.x0, y = problem.x0;
        double t = 1.0;
        for (int k = 1; k <= iterations; ++k) {
            Vector z = tight_prox(alpha, y - alpha * problem.f.gradient(y));
            double fz = problem.objective(z);
            double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            if (fz <= best_val) {
                if (k > iterations * 9 / 10) tail_drop += best_val - fz;
                best_val = fz;
                best_x = z;
            }
            // monotone variant: momentum from the raw sequence, best kept aside
            y = z + ((t - 1.0) / t_next) * (z - x);
            x_prev = std::move(x);
            x = std::move(z);
            t = t_next;
        }
    } else {
        double alpha0 = problem.L ? 1.0 / *problem.L : 1.0;
        Vector x = problem.x0;
        for (int k = 1; k <= iterations; ++k) {
            double alpha = alpha0 / k;
            Vector u = problem.f.subgradient(x);
            Vector y = x - alpha * u;
            Vector xb = tight_prox(alpha, y);
            Vector w = (y - xb) / alpha;
            x = problem.C.project(y - alpha * w);
            double fx = problem.objective(x);
            if (fx <= best_val) {
                if (k > iterations * 9 / 10) tail_drop += best_val - fx;
                best_val = fx;
                best_x = x;
            }
        }
    }

    ref.x_star = best_x;
    ref.s_star = best_val;
    ref.d0 = (problem.x0 - best_x).norm();
    ref.trusted = tail_drop <= inner_tol * std::max(1.0, std::abs(best_val));
    return ref;
}

Vector read_pgm(const std::string& path, int& rows, int& cols) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
    auto next_token = [&in]() {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string line;
                std::getline(in, line);
                continue;
            }
            return tok;
        }
        throw std::runtime_error("read_pgm: truncated header");
    };
    if (next_token() != "P5") throw std::runtime_error("read_pgm: not a P5 file");
    cols = std::stoi(next_token());
    rows = std::stoi(next_token());
    int maxval = std::stoi(next_token());
    if (maxval != 255) throw std::runtime_error("read_pgm: only 8-bit images supported");
    in.get();  // single whitespace after maxval
    std::vector<unsigned char> raw(static_cast<size_t>(rows) * cols);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw std::runtime_error("read_pgm: truncated pixel data");
    Vector img(rows * cols);
    for (size_t i = 0; i < raw.size(); ++i) img[static_cast<Eigen::Index>(i)] = raw[i] / 255.0;
    return img;
}

void write_pgm(const std::string& path, const Vector& image, int rows, int cols) {
    if (image.size() != static_cast<Eigen::Index>(rows) * cols)
        throw std::invalid_argument("write_pgm: shape mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
    out << "P5\n" << cols << " " << rows << "\n255\n";
    for (Eigen::Index i = 0; i < image.size(); ++i) {
        double v = std::clamp(image[i], 0.0, 1.0);
        out.put(static_cast<char>(std::lround(v * 255.0)));
    }
}

}  // namespace proxeps
