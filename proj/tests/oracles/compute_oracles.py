"""Closed-form reference values frozen into the C++ tests.

Run with `python3 compute_oracles.py`; prints one `name = value` line per
oracle with 17 significant digits.
"""
import sympy as sp


def coords(n):
    return sp.symbols(f"x1:{n + 1}", real=True)


def radius(x):
    return sp.sqrt(sum(xi**2 for xi in x))


def christoffel(g, x):
    n = len(x)
    gi = g.inv()
    return [[[sp.simplify(sum(gi[k, l] * (sp.diff(g[j, l], x[i]) + sp.diff(g[i, l], x[j]) - sp.diff(g[i, j], x[l]))
                              for l in range(n)) / 2)
              for j in range(n)] for i in range(n)] for k in range(n)]


def ricci(g, x):
    n = len(x)
    gam = christoffel(g, x)
    ric = sp.zeros(n, n)
    for i in range(n):
        for j in range(n):
            s = 0
            for k in range(n):
                s += sp.diff(gam[k][i][j], x[k]) - sp.diff(gam[k][i][k], x[j])
                for l in range(n):
                    s += gam[k][k][l] * gam[l][i][j] - gam[k][j][l] * gam[l][i][k]
            ric[i, j] = s
    return ric, gam


def at(expr, x, point):
    return sp.N(expr.subs(dict(zip(x, point))), 17)


def out(name, value):
    print(f"{name} = {sp.N(value, 17)}")


def main():
    # Schwarzschild isotropic, n = 3, m = 1, at (4, 0, 0).
    x = coords(3)
    r = radius(x)
    u = 1 + sp.Rational(1, 2) / r
    g = u**4 * sp.eye(3)
    p = (4, 0, 0)
    ric, gam = ricci(g, x)
    out("schw3_g11_r2", at(g[0, 0], x, (2, 0, 0)))
    out("schw3_gamma_0_00", at(gam[0][0][0], x, p))
    out("schw3_gamma_1_01", at(gam[1][0][1], x, p))
    out("schw3_gamma_0_11", at(gam[0][1][1], x, p))
    out("schw3_ric_00", at(ric[0, 0], x, p))
    out("schw3_ric_11", at(ric[1, 1], x, p))
    scal = sum(g.inv()[i, j] * ric[i, j] for i in range(3) for j in range(3))
    out("schw3_scal", at(scal, x, p))

    # Flux mass of u^4 delta on the sphere of radius R: -2 d_r(u^4) R^2 * 4 pi / (16 pi).
    R = sp.symbols("R", positive=True)
    uR = 1 + sp.Rational(1, 2) / R
    adm_R = sp.simplify(-2 * sp.diff(uR**4, R) * R**2 / 4)
    out("schw3_adm_R8", adm_R.subs(R, 8))
    out("schw3_adm_R64", adm_R.subs(R, 64))
    print(f"# schw3 adm(R) = {sp.factor(adm_R)}")

    # g = (1 + a) delta with a = 0.1 / r, n = 3, at (3, 4, 0) / 5 * 5.
    a = sp.Rational(1, 10) / r
    g = (1 + a) * sp.eye(3)
    p = (3, 4, 0)
    ric, gam = ricci(g, x)
    out("rad3_gamma_0_00", at(gam[0][0][0], x, p))
    out("rad3_gamma_2_02", at(gam[2][0][2], x, p))
    out("rad3_ric_00", at(ric[0, 0], x, p))
    out("rad3_ric_01", at(ric[0, 1], x, p))
    out("rad3_ric_22", at(ric[2, 2], x, p))
    scal = sum(g.inv()[i, j] * ric[i, j] for i in range(3) for j in range(3))
    out("rad3_scal", at(scal, x, p))
    # V^i = (g^ij g^kl - g^ik g^jl) d_k e_jl, radial component.
    gi = g.inv()
    e = g - sp.eye(3)
    V = [sum((gi[i, j] * gi[k, l] - gi[i, k] * gi[j, l]) * sp.diff(e[j, l], x[k])
             for j in range(3) for k in range(3) for l in range(3)) for i in range(3)]
    vr = sum(V[i] * x[i] for i in range(3)) / r
    out("rad3_v_radial", at(vr, x, p))
    out("rad3_flux_mass_R10", (-(sp.diff(sp.Rational(1, 10) / R, R)) * R**2 / 2).subs(R, 10))

    # Non-harmonic conformal factor, n = 3: u = 1 + 0.1 exp(-r / 50) / r.
    uq = 1 + sp.Rational(1, 10) * sp.exp(-r / 50) / r
    lap = sum(sp.diff(uq, xi, 2) for xi in x)
    scal_formula = -8 * lap / uq**5
    out("conf3_decay_scal_at_5", at(scal_formula, x, (5, 0, 0)))

    # n = 5, u = 1 + 0.2 r^-3 is harmonic.
    x5 = coords(5)
    r5 = radius(x5)
    u5 = 1 + sp.Rational(1, 5) / r5**3
    out("conf5_laplacian", sp.simplify(sum(sp.diff(u5, xi, 2) for xi in x5)))

    # Linear surface integral for u = 1 + A r^{2-n}: mass 2A.
    for n, A in ((3, sp.Rational(1, 2)), (4, sp.Rational(1, 5)), (5, sp.Rational(1, 10))):
        uR = 1 + A * R**(2 - n)
        gR = uR**sp.Rational(4, n - 2)
        # (d_j g_ij - d_i g_jj) nu^i = -(n - 1) d_r gR; area omega R^{n-1}; normalization 1 / (2 (n-1) omega).
        flux = -(n - 1) * sp.diff(gR, R) * R**(n - 1) / (2 * (n - 1))
        out(f"conf{n}_mass_limit", sp.limit(flux, R, sp.oo))
        out(f"conf{n}_adm_R16", flux.subs(R, 16))

    # Weighted norms and quadrature.
    out("weighted_r2_norm", sp.sqrt(4 * sp.pi / 3))
    s = sp.symbols("s", positive=True)
    out("sphere_x1sq", 4 * sp.pi / 3)
    out("annulus_r4", sp.integrate(4 * sp.pi * s**-2, (s, 1, 2)))
    # Jump at 1.5: f = r^-4 inside, 2 r^-4 outside, on [1, 2].
    out("annulus_jump", sp.integrate(4 * sp.pi * s**-2, (s, 1, sp.Rational(3, 2)))
        + sp.integrate(8 * sp.pi * s**-2, (s, sp.Rational(3, 2), 2)))
    # Hoelder: both sides on [1, R_out] for u = 1/r, p1 = p2 = 4, q = 2, tau = 1/2.
    lhs = sp.sqrt(4 * sp.pi * sp.integrate(s**-3, (s, 1, 64)))
    rhs = (4 * sp.pi * sp.integrate(s**-3, (s, 1, 64)))**sp.Rational(1, 2)
    out("holder_ratio", lhs / rhs)
    # Almost identity s(r) = r + 0.05 r^{0.2}.
    out("almost_identity_s10", 10 + sp.Rational(1, 20) * sp.Integer(10)**sp.Rational(1, 5))


if __name__ == "__main__":
    main()
