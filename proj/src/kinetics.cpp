#include "trm/kinetics.hpp"

#include <cmath>

#include "trm/error.hpp"
#include "trm/spline.hpp"

namespace trm {

namespace {

// running sums of line contributions at a junction
struct JunctionAccum {
    Vec2 sum_u{0, 0};      // unit departure directions (length-weighted balance)
    Vec2 sum_e{0, 0};      // (E_left - E_right) * left normal, per line
    double sum_len = 0.0;  // incident line lengths
};

// Replace each nodal curvature with a tent-weighted average of the nodal
// values within +-w of chord arclength. The triangular window never flips
// the sign of a Fourier mode, so the averaged signal cannot feed a growing
// oscillation; a stretch of constant curvature averages to itself.
void mollify_kappa(const std::vector<Vec2>& pts, bool closed, double w,
                   std::vector<double>& kappa) {
    size_t n = pts.size();
    if (n < 3 || !(w > 0.0)) return;
    std::vector<double> s(n, 0.0);  // cumulative chord length per node
    for (size_t j = 1; j < n; ++j) s[j] = s[j - 1] + norm(pts[j] - pts[j - 1]);
    double total = s[n - 1] + (closed ? norm(pts[0] - pts[n - 1]) : 0.0);
    if (!(total > 0.0)) return;
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) {
        double acc = 0.0, tot = 0.0;
        for (size_t j = 0; j < n; ++j) {
            double d = std::abs(s[j] - s[i]);
            if (closed) d = std::min(d, total - d);
            double wt = 1.0 - d / w;
            if (wt <= 0.0) continue;
            acc += wt * kappa[j];
            tot += wt;
        }
        out[i] = acc / tot;  // tot >= 1: node i itself always contributes
    }
    kappa = std::move(out);
}

} // namespace

std::vector<Vec2> node_velocities(const Mesh& m, const Topology& topo,
                                  const Kinetics& kin,
                                  const std::vector<double>& energy) {
    std::vector<Vec2> vel(m.n_nodes(), Vec2{0, 0});
    std::vector<JunctionAccum> acc(topo.points.size());

    const double mg = kin.mobility * kin.gamma;
    const double md = kin.mobility * kin.delta;

    for (const auto& ln : topo.lines) {
        if (ln.exterior()) continue;  // domain walls do not migrate

        std::vector<Vec2> pts(ln.nodes.size());
        for (size_t i = 0; i < ln.nodes.size(); ++i) pts[i] = m.pos[ln.nodes[i]];
        CurveGeom g = curve_geometry(pts, ln.closed);
        if (kin.capillarity && kin.curv_window > 0.0)
            mollify_kappa(pts, ln.closed, kin.curv_window, g.kappa);

        double de = grain_energy(energy, ln.surf_left) - grain_energy(energy, ln.surf_right);

        size_t lo = ln.closed ? 0 : 1;
        size_t hi = ln.closed ? ln.nodes.size() : ln.nodes.size() - 1;
        for (size_t i = lo; i < hi; ++i) {
            int n = ln.nodes[i];
            Vec2 v = g.normal[i] * (md * de);
            if (kin.capillarity) v += g.curvature_vector(i) * mg;
            vel[n] = v;
        }

        if (!ln.closed) {
            // endpoint contributions for the junction force balances.
            // tangent/normal keep the stored orientation; departure direction
            // flips at the back end.
            size_t last = ln.nodes.size() - 1;
            int pf = topo.node_point[ln.nodes[0]];
            int pb = topo.node_point[ln.nodes[last]];
            if (pf < 0 || pb < 0) throw InvariantError("open line must end at junctions");
            acc[pf].sum_u += g.tangent[0];
            acc[pf].sum_e += g.normal[0] * de;
            acc[pf].sum_len += ln.length;
            acc[pb].sum_u -= g.tangent[last];
            acc[pb].sum_e += g.normal[last] * de;
            acc[pb].sum_len += ln.length;
        }
    }

    for (size_t pi = 0; pi < topo.points.size(); ++pi) {
        int n = topo.points[pi].node;
        const JunctionAccum& a = acc[pi];
        if (m.corner[n]) continue;                  // pinned
        if (!(a.sum_len > 0.0)) continue;           // no live interior lines

        if (!m.hull[n]) {
            Vec2 v = a.sum_e * (0.5 * md);
            if (kin.capillarity) v += a.sum_u * (mg * 2.0 / a.sum_len);
            vel[n] = v;
        } else {
            // wall junction: mirror completion across the wall collapses to a
            // projection on the wall tangent, with the bulk term at full weight
            int w = m.wall_of(n, 1e-9 * std::sqrt(std::abs(m.domain_area()) + 1.0));
            if (w < 0) throw InvariantError("hull junction not on a domain edge");
            Vec2 a0 = m.domain[w], a1 = m.domain[(w + 1) % m.domain.size()];
            Vec2 tw = normalized(a1 - a0);
            Vec2 v = tw * (md * dot(a.sum_e, tw));
            if (kin.capillarity) v += tw * (mg * 2.0 / a.sum_len * dot(a.sum_u, tw));
            vel[n] = v;
        }
    }
    return vel;
}

} // namespace trm
