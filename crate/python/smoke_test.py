"""Smoke test for the robin_corner extension module."""

import math

import robin_corner as rc


def main():
    square = rc.Polygon.square()
    assert len(square) == 4
    assert abs(square.area() - 1.0) < 1e-15
    assert [round(c[3], 12) for c in square.corners()] == [round(math.pi / 2, 12)] * 4

    domain = rc.Domain.polygon(square)
    assert domain.energy() == -2.0
    assert rc.Domain.named("lshape").energy() == -2.0
    assert rc.Domain.disk(1.0).energy() == -1.0
    assert rc.sector_energy(math.pi / 2) == -2.0

    r = domain.solve(8.0)
    assert r.eigenvalue < 0 and r.residual < 1e-8
    assert len(r.eigenvector) == r.nodes
    print(r)

    table = domain.sweep([4.0, 8.0, 16.0])
    rows = table.rows()
    assert len(rows) == 3 and all(lam < 0 for _, lam, _, _ in rows)
    assert table.to_csv().splitlines()[0] == "alpha,lambda,lambda_over_alpha2,remainder,residual,nodes"
    print(table.rate_fit())

    run = rc.sector_oracle(math.pi / 2, 8.0)
    assert run.bc == "dirichlet" and -2.0 <= run.energy < -1.9
    print(run)

    corner = rc.delta_corner_oracle(math.pi / 2)
    assert corner.energy < rc.DELTA_LINE_ENERGY
    print(corner)

    exact = rc.circle_delta_eigenvalue(6.0, 1.0)
    d = rc.delta_solve(6.0, 1.0, circle=1.0)
    assert abs(d.eigenvalue - exact) < 1e-2 * abs(exact)

    assert rc.critical_temperature(domain, 1.0, 10.0, -1.0, eigenvalue=-200.0) == 201.0
    c_eps, ratio = rc.ehrling_constant(domain, 1.0 / 16)
    assert c_eps > 0 and abs(ratio - 1.0) < 0.05

    try:
        rc.Polygon([(0, 0), (1, 1), (1, 0), (0, 1)])
    except ValueError:
        pass
    else:
        raise AssertionError("self-intersecting polygon accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
