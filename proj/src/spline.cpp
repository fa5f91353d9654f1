#include "igafc/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace igafc {

namespace {

void validate_knots(const std::vector<double>& knots, int degree) {
    if (degree < 0) throw std::invalid_argument("knot vector: degree must be nonnegative");
    const int nknots = static_cast<int>(knots.size());
    const int n = nknots - degree - 1;
    if (n < degree + 1)
        throw std::invalid_argument("knot vector: needs at least degree+1 basis functions");
    for (int i = 0; i + 1 < nknots; ++i)
        if (knots[i] > knots[i + 1])
            throw std::invalid_argument("knot vector: knots must be nondecreasing");
    if (knots.front() == knots.back())
        throw std::invalid_argument("knot vector: zero-length parameter range");
    // Clamped: first/last knot repeated exactly degree+1 times.
    for (int i = 0; i <= degree; ++i) {
        if (knots[i] != knots.front() || knots[nknots - 1 - i] != knots.back())
            throw std::invalid_argument("knot vector: not open (end knots must repeat degree+1 times)");
    }
    if (knots[degree + 1] == knots.front() || knots[nknots - degree - 2] == knots.back())
        throw std::invalid_argument("knot vector: end knots repeated more than degree+1 times");
    // Interior multiplicity at most degree+1.
    int run = 1;
    for (int i = degree + 1; i < nknots - degree - 1; ++i) {
        run = (knots[i] == knots[i - 1]) ? run + 1 : 1;
        if (run > degree + 1)
            throw std::invalid_argument("knot vector: interior multiplicity exceeds degree+1");
    }
}

} // namespace

KnotVector::KnotVector(std::vector<double> knots, int degree)
    : knots_(std::move(knots)), degree_(degree) {
    validate_knots(knots_, degree_);
}

KnotVector KnotVector::uniform(int num_basis, int degree) {
    if (num_basis < degree + 1)
        throw std::invalid_argument("uniform knot vector: num_basis must be at least degree+1");
    std::vector<double> knots(static_cast<std::size_t>(num_basis + degree + 1));
    const int spans = num_basis - degree;
    for (int i = 0; i <= degree; ++i) {
        knots[i] = 0.0;
        knots[knots.size() - 1 - i] = 1.0;
    }
    for (int i = 1; i < spans; ++i)
        knots[degree + i] = static_cast<double>(i) / spans;
    return KnotVector(std::move(knots), degree);
}

int KnotVector::num_spans() const {
    int count = 0;
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
        if (knots_[i] != knots_[i + 1]) ++count;
    return count;
}

int KnotVector::multiplicity(double xi) const {
    return static_cast<int>(std::count(knots_.begin(), knots_.end(), xi));
}

double KnotVector::greville(int a) const {
    if (degree_ == 0) return 0.5 * (knots_[a] + knots_[a + 1]);
    double sum = 0.0;
    for (int i = 1; i <= degree_; ++i) sum += knots_[a + i];
    return sum / degree_;
}

int KnotVector::find_span(double xi) const {
    if (!(xi >= front() && xi <= back()))
        throw std::domain_error("find_span: parameter outside the knot range");

    const int n = num_basis();
    if (xi >= back()) return static_cast<int>(knots_.size()) - degree_ - 2;

    int low = degree_;
    int high = n;   // knots_[n] is the first copy of the right end
    int mid = (low + high) / 2;
    while (xi < knots_[mid] || xi >= knots_[mid + 1]) {
        if (xi < knots_[mid])
            high = mid;
        else
            low = mid;
        mid = (low + high) / 2;
    }
    return mid;
}

BasisSpan KnotVector::eval_basis(double xi) const {
    const int k = find_span(xi);
    const int p = degree_;

    BasisSpan out;
    out.span = k;
    out.degree = p;
    out.values.assign(static_cast<std::size_t>(p + 1), 0.0);

    // Triangular form of the Cox-de-Boor recursion; equivalent to the raw
    // recursion with 0/0 := 0 and never divides by a vanishing span length.
    std::vector<double> left(p + 1), right(p + 1);
    out.values[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = xi - knots_[k + 1 - j];
        right[j] = knots_[k + j] - xi;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double tmp = out.values[r] / (right[r + 1] + left[j - r]);
            out.values[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        out.values[j] = saved;
    }
    return out;
}

BasisSpan KnotVector::eval_basis_derivs(double xi, int order) const {
    if (order < 0) throw std::invalid_argument("eval_basis_derivs: negative order");
    const int k = find_span(xi);
    const int p = degree_;
    const int de = std::min(order, p);   // orders beyond the degree are exact zeros

    std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1));
    std::vector<double> left(p + 1), right(p + 1);
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = xi - knots_[k + 1 - j];
        right[j] = knots_[k + j] - xi;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double tmp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        ndu[j][j] = saved;
    }

    BasisSpan out;
    out.span = k;
    out.degree = p;
    out.values.resize(p + 1);
    for (int j = 0; j <= p; ++j) out.values[j] = ndu[j][p];
    out.derivs.assign(static_cast<std::size_t>(order),
                      std::vector<double>(static_cast<std::size_t>(p + 1), 0.0));
    if (de == 0) return out;

    std::vector<std::vector<double>> a(2, std::vector<double>(p + 1));
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        for (int m = 1; m <= de; ++m) {
            double d = 0.0;
            const int rk = r - m;
            const int pk = p - m;
            if (r >= m) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            const int j1 = (rk >= -1) ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? (m - 1) : (p - r);
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][m] = -a[s1][m - 1] / ndu[pk + 1][r];
                d += a[s2][m] * ndu[r][pk];
            }
            out.derivs[m - 1][r] = d;
            std::swap(s1, s2);
        }
    }
    double factor = p;
    for (int m = 1; m <= de; ++m) {
        for (int j = 0; j <= p; ++j) out.derivs[m - 1][j] *= factor;
        factor *= (p - m);
    }
    return out;
}

KnotInsertion plan_knot_insertion(const KnotVector& kv, double xi_bar) {
    if (!(xi_bar > kv.front() && xi_bar < kv.back()))
        throw std::domain_error("insert_knot: new knot must be strictly inside the range");
    if (kv.multiplicity(xi_bar) >= kv.degree())
        throw std::invalid_argument("insert_knot: refused, multiplicity would exceed the degree");

    const int p = kv.degree();
    const int k = kv.find_span(xi_bar);

    KnotInsertion ins{kv, k - p + 1, k + 1, {}};
    ins.alpha.resize(static_cast<std::size_t>(p));
    for (int i = k - p + 1; i <= k; ++i)
        ins.alpha[static_cast<std::size_t>(i - (k - p + 1))] =
            (xi_bar - kv.knot(i)) / (kv.knot(i + p) - kv.knot(i));

    std::vector<double> knots = kv.knots();
    knots.insert(knots.begin() + (k + 1), xi_bar);
    ins.kv = KnotVector(std::move(knots), p);
    return ins;
}

TensorSplineSpace::TensorSplineSpace(KnotVector kv_xi, KnotVector kv_eta)
    : kv_xi_(std::move(kv_xi)), kv_eta_(std::move(kv_eta)) {}

bool TensorSplineSpace::support_overlap(int i, int j) const {
    const auto [ai, bi] = tensor_index(i);
    const auto [aj, bj] = tensor_index(j);
    return std::abs(ai - aj) <= kv_xi_.degree() && std::abs(bi - bj) <= kv_eta_.degree();
}

bool TensorSplineSpace::is_boundary(int j) const {
    const auto [a, b] = tensor_index(j);
    return a == 0 || a == num_xi() - 1 || b == 0 || b == num_eta() - 1;
}

std::vector<int> TensorSplineSpace::boundary_dofs() const {
    std::vector<int> out;
    for (int j = 0; j < num_dofs(); ++j)
        if (is_boundary(j)) out.push_back(j);
    return out;
}

Vec2 TensorSplineSpace::greville(int j) const {
    const auto [a, b] = tensor_index(j);
    return {kv_xi_.greville(a), kv_eta_.greville(b)};
}

double eval_field(const TensorSplineSpace& space, std::span<const double> coeffs,
                  double xi, double eta) {
    const BasisSpan bx = space.xi().eval_basis(xi);
    const BasisSpan be = space.eta().eval_basis(eta);
    double value = 0.0;
    for (int jb = 0; jb <= be.degree; ++jb) {
        double partial = 0.0;
        const int b = be.first() + jb;
        for (int ja = 0; ja <= bx.degree; ++ja)
            partial += bx.values[ja] * coeffs[space.flat_index(bx.first() + ja, b)];
        value += be.values[jb] * partial;
    }
    return value;
}

namespace {

// Midpoint of the widest nonempty span, leftmost on ties.
double next_insertion_point(const KnotVector& kv) {
    double best_width = -1.0;
    double best_mid = 0.0;
    const auto& knots = kv.knots();
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double w = knots[i + 1] - knots[i];
        if (w > best_width) {
            best_width = w;
            best_mid = 0.5 * (knots[i] + knots[i + 1]);
        }
    }
    return best_mid;
}

} // namespace

std::pair<KnotVector, std::vector<double>> refine_curve(const KnotVector& kv,
                                                        const std::vector<double>& coeffs,
                                                        int target_basis) {
    if (target_basis < kv.num_basis())
        throw std::invalid_argument("refine_curve: target below current basis count");
    KnotVector cur = kv;
    std::vector<double> c = coeffs;
    while (cur.num_basis() < target_basis) {
        KnotInsertion ins = plan_knot_insertion(cur, next_insertion_point(cur));
        c = ins.apply(c);
        cur = ins.kv;
    }
    return {std::move(cur), std::move(c)};
}

RefinedSpace refine_space(const TensorSplineSpace& space, const std::vector<Vec2>& net,
                          int target_xi, int target_eta) {
    if (net.size() != static_cast<std::size_t>(space.num_dofs()))
        throw std::invalid_argument("refine_space: net size does not match the space");
    if (target_xi < space.num_xi() || target_eta < space.num_eta())
        throw std::invalid_argument("refine_space: target below current basis count");

    KnotVector kx = space.xi();
    KnotVector ke = space.eta();
    std::vector<Vec2> cur = net;
    int nx = space.num_xi();
    const int ny = space.num_eta();

    while (kx.num_basis() < target_xi) {
        KnotInsertion ins = plan_knot_insertion(kx, next_insertion_point(kx));
        std::vector<Vec2> next(static_cast<std::size_t>((nx + 1) * ny));
        std::vector<Vec2> row(static_cast<std::size_t>(nx));
        for (int b = 0; b < ny; ++b) {
            for (int a = 0; a < nx; ++a) row[a] = cur[b * nx + a];
            const std::vector<Vec2> refined = ins.apply(row);
            for (int a = 0; a <= nx; ++a) next[b * (nx + 1) + a] = refined[a];
        }
        cur = std::move(next);
        kx = ins.kv;
        ++nx;
    }

    int neta = ny;
    while (ke.num_basis() < target_eta) {
        KnotInsertion ins = plan_knot_insertion(ke, next_insertion_point(ke));
        std::vector<Vec2> next(static_cast<std::size_t>(nx * (neta + 1)));
        std::vector<Vec2> col(static_cast<std::size_t>(neta));
        for (int a = 0; a < nx; ++a) {
            for (int b = 0; b < neta; ++b) col[b] = cur[b * nx + a];
            const std::vector<Vec2> refined = ins.apply(col);
            for (int b = 0; b <= neta; ++b) next[b * nx + a] = refined[b];
        }
        cur = std::move(next);
        ke = ins.kv;
        ++neta;
    }

    return {TensorSplineSpace(std::move(kx), std::move(ke)), std::move(cur)};
}

} // namespace igafc
