import math

import numpy as np
import pytest

from bec_steering.bounds import reference_table
from bec_steering.fock import ModelParams
from bec_steering.sweep import (
    CSV_COLUMNS,
    SearchSettings,
    criteria_at,
    default_horizon,
    optimize_over_t,
    scan_time,
    table_one,
)

P100 = ModelParams(100, 1.0, -1.0)


def test_scan_small_time_limit():
    res = scan_time(P100, [1e-7, 1e-5, 1e-3])
    var_sx = res.column("var_sx")
    assert var_sx[0] < var_sx[1] < var_sx[2]
    assert var_sx[0] < 1e-8


def test_entanglement_signature_appears_then_fades():
    res = scan_time(P100, np.linspace(1e-4, 0.05, 200))
    e = res.column("e_hz")
    assert e.min() < 1 and e[-1] > 1
    assert res.optimum["e_hz_theta"] == res.column("e_hz_theta").min()


def test_scan_revival():
    ts = np.linspace(0, 2 * math.pi, 9)[:-1]
    a = scan_time(ModelParams(20, 1.0, -1.0), ts)
    b = scan_time(ModelParams(20, 1.0, -1.0), ts + 2 * math.pi)
    for ra, rb in zip(a.rows, b.rows):
        for c in CSV_COLUMNS[1:]:
            assert abs(ra[c] - rb[c]) < 1e-8 * max(1, abs(ra[c]))


def test_scan_errors():
    with pytest.raises(ValueError):
        scan_time(P100, [])
    with pytest.raises(ValueError):
        scan_time(P100, [0.1], objective="bogus")
    with pytest.raises(ValueError):
        scan_time(ModelParams(1), [0.1])


def test_csv_header_and_worker_determinism():
    grid = np.linspace(0, 0.02, 17)
    one = scan_time(P100, grid, workers=1).to_csv()
    two = scan_time(P100, grid, workers=3).to_csv()
    assert one == two
    assert one.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert len(one.splitlines()) == 18


def test_closed_and_fock_methods_agree():
    for t in (0.0, 0.004, 0.03):
        a = criteria_at(P100.at(t), "fock").as_dict()
        b = criteria_at(P100.at(t), "closed").as_dict()
        for key, v in a.items():
            if isinstance(v, float) and math.isfinite(v):
                assert abs(v - b[key]) < 1e-9 * max(1, abs(v)), key


def test_horizon():
    assert default_horizon(P100) == pytest.approx(math.pi / 4)
    with pytest.raises(ValueError):
        default_horizon(ModelParams(10, 1.0, 1.0))


@pytest.mark.parametrize("n, ratio", [(50, 0.1951), (100, 0.1572), (1000, 0.07457)])
def test_optimum_ratio(n, ratio):
    opt = optimize_over_t(ModelParams(n, 1.0, -1.0))
    assert opt.bracketed
    assert abs(opt.ratio - ratio) / ratio < 1e-3
    grid = scan_time(ModelParams(n, 1.0, -1.0), np.geomspace(opt.t / 3, opt.t * 3, 301))
    assert opt.value <= grid.column("e_hz_theta").min() + 1e-12


def test_linear_grid_and_edge_optimum():
    opt = optimize_over_t(P100, settings=SearchSettings(grid_points=400, spacing="linear", t_max=0.2))
    assert abs(opt.ratio - 0.1572) / 0.1572 < 1e-3
    edge = optimize_over_t(P100, settings=SearchSettings(grid_points=10, t_max=1e-4))
    assert not edge.bracketed


def test_optimal_squeezing_improves_with_n():
    values = [optimize_over_t(ModelParams(n, 1.0, -1.0), "xi2_bar").value
              for n in (20, 50, 100, 200, 500, 1000)]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_table_one_rows():
    assert table_one([]) == []
    rows = table_one([50, 100], table=reference_table())
    assert [r.two_s for r in rows] == [21, 42]
    rows = table_one([0, 50], table=reference_table())
    assert rows[0].error is not None and rows[1].two_s == 21
