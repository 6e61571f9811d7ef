#include "trm/spline.hpp"

#include <cmath>

#include "trm/error.hpp"

namespace trm {

void solve_tridiag(std::vector<double>& a, std::vector<double>& b,
                   std::vector<double>& c, std::vector<double>& d) {
    const size_t n = d.size();
    if (n == 0) return;
    for (size_t i = 1; i < n; ++i) {
        double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    d[n - 1] /= b[n - 1];
    for (size_t i = n - 1; i-- > 0;)
        d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

void solve_cyclic_tridiag(const std::vector<double>& a, const std::vector<double>& b,
                          const std::vector<double>& c, double alpha, double beta,
                          std::vector<double>& d) {
    const size_t n = d.size();
    if (n == 1) {
        d[0] /= (b[0] + alpha + beta);
        return;
    }
    if (n == 2) {
        // corners collide with the regular bands; solve the 2x2 directly
        double a00 = b[0], a01 = c[0] + alpha, a10 = a[1] + beta, a11 = b[1];
        double det = a00 * a11 - a01 * a10;
        double x0 = (d[0] * a11 - a01 * d[1]) / det;
        double x1 = (a00 * d[1] - d[0] * a10) / det;
        d[0] = x0;
        d[1] = x1;
        return;
    }
    double gamma = -b[0];
    std::vector<double> aa(a), bb(b), cc(c);
    bb[0] = b[0] - gamma;
    bb[n - 1] = b[n - 1] - alpha * beta / gamma;

    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = beta;

    std::vector<double> a2(aa), b2(bb), c2(cc);
    solve_tridiag(aa, bb, cc, d);       // d <- solution of T x = d
    solve_tridiag(a2, b2, c2, u);       // u <- solution of T z = u

    double fact = (d[0] + alpha * d[n - 1] / gamma) /
                  (1.0 + u[0] + alpha * u[n - 1] / gamma);
    for (size_t i = 0; i < n; ++i) d[i] -= fact * u[i];
}

namespace {

struct Derivs {
    std::vector<Vec2> d1, d2;  // first and second parametric derivatives at nodes
};

Derivs spline_derivs(const std::vector<Vec2>& p, bool closed) {
    const size_t n = p.size();
    Derivs out;
    out.d1.resize(n);
    out.d2.resize(n);

    auto chord = [&](size_t i, size_t j) {
        double h = dist(p[i], p[j]);
        if (!(h > 0.0))
            throw InvariantError("coincident nodes in curve chain");
        return h;
    };

    if (!closed) {
        if (n < 2) throw InvariantError("open curve needs at least 2 nodes");
        if (n == 2) {
            Vec2 t = (p[1] - p[0]) / chord(0, 1);
            out.d1[0] = out.d1[1] = t;
            out.d2[0] = out.d2[1] = {0, 0};
            return out;
        }
        std::vector<double> h(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) h[i] = chord(i, i + 1);

        // natural end conditions: second derivative zero at both ends.
        // unknowns are the interior second derivatives.
        size_t m = n - 2;
        std::vector<double> a(m), b(m), c(m), dx(m), dy(m);
        for (size_t k = 0; k < m; ++k) {
            size_t i = k + 1;
            a[k] = h[i - 1] / 6.0;
            b[k] = (h[i - 1] + h[i]) / 3.0;
            c[k] = h[i] / 6.0;
            Vec2 r = (p[i + 1] - p[i]) / h[i] - (p[i] - p[i - 1]) / h[i - 1];
            dx[k] = r.x;
            dy[k] = r.y;
        }
        {
            auto a1 = a, b1 = b, c1 = c;
            solve_tridiag(a1, b1, c1, dx);
            solve_tridiag(a, b, c, dy);
        }
        std::vector<Vec2> M(n, {0, 0});
        for (size_t k = 0; k < m; ++k) M[k + 1] = {dx[k], dy[k]};

        for (size_t i = 0; i + 1 < n; ++i)
            out.d1[i] = (p[i + 1] - p[i]) / h[i] - (M[i] * 2.0 + M[i + 1]) * (h[i] / 6.0);
        out.d1[n - 1] = (p[n - 1] - p[n - 2]) / h[n - 2] +
                        (M[n - 2] + M[n - 1] * 2.0) * (h[n - 2] / 6.0);
        out.d2 = M;
        return out;
    }

    if (n < 3) throw InvariantError("closed curve needs at least 3 nodes");
    std::vector<double> h(n);
    for (size_t i = 0; i < n; ++i) h[i] = chord(i, (i + 1) % n);

    std::vector<double> a(n), b(n), c(n), dx(n), dy(n);
    for (size_t i = 0; i < n; ++i) {
        size_t im = (i + n - 1) % n;
        a[i] = h[im] / 6.0;
        b[i] = (h[im] + h[i]) / 3.0;
        c[i] = h[i] / 6.0;
        Vec2 r = (p[(i + 1) % n] - p[i]) / h[i] - (p[i] - p[im]) / h[im];
        dx[i] = r.x;
        dy[i] = r.y;
    }
    // wrap-around entries: row 0 couples to n-1, row n-1 couples to 0
    double alpha = a[0], beta = c[n - 1];
    solve_cyclic_tridiag(a, b, c, alpha, beta, dx);
    solve_cyclic_tridiag(a, b, c, alpha, beta, dy);

    std::vector<Vec2> M(n);
    for (size_t i = 0; i < n; ++i) M[i] = {dx[i], dy[i]};
    for (size_t i = 0; i < n; ++i) {
        size_t ip = (i + 1) % n;
        out.d1[i] = (p[ip] - p[i]) / h[i] - (M[i] * 2.0 + M[ip]) * (h[i] / 6.0);
    }
    out.d2 = M;
    return out;
}

} // namespace

CurveGeom curve_geometry(const std::vector<Vec2>& pts, bool closed) {
    Derivs dv = spline_derivs(pts, closed);
    const size_t n = pts.size();
    CurveGeom g;
    g.tangent.resize(n);
    g.normal.resize(n);
    g.kappa.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double s = norm(dv.d1[i]);
        if (!(s > 0.0)) throw InvariantError("vanishing tangent on curve");
        g.tangent[i] = dv.d1[i] / s;
        g.normal[i] = perp(g.tangent[i]);
        g.kappa[i] = cross(dv.d1[i], dv.d2[i]) / (s * s * s);
    }
    return g;
}

} // namespace trm
