# -*- coding: utf-8 -*-
"""CSV / JSON 输出"""
import numpy as np
import pandas as pd
import pytest

from core.distributions import delta_at, from_density
from core.exceptions import ParameterError
from core.fock import PolyTest, poly_D_dist, power_dist, power_test
from core.halfline import DecayTag
from core.opcalc import FockState
from core.transforms import fourier_fn, xi_grid
from utils.serialization import (read_fock_state, read_json, read_testfn_csv, write_distribution,
                                 write_fock_state, write_freqfn_csv, write_magnitude_csv, write_poly_dist,
                                 write_poly_test, write_testfn_csv)


class TestTestFnCsv:

    def test_sidecar_rebuilds_grid(self, tmp_path, gauss_fn):
        path = write_testfn_csv(gauss_fn, tmp_path / "gauss.csv")
        meta = read_json(tmp_path / "gauss.json")
        assert meta["rule"] == "gregory" and meta["n_points"] == 1024
        back = read_testfn_csv(path)
        assert back.decay_tag == DecayTag.GAUSSIAN
        assert back.sup_distance(gauss_fn) == 0.0

    def test_columns(self, tmp_path, exp_fn):
        write_testfn_csv(exp_fn, tmp_path / "exp.csv")
        df = pd.read_csv(tmp_path / "exp.csv")
        assert list(df.columns) == ["t", "re", "im"]
        assert df["t"].iloc[0] == 0.0

    def test_missing_sidecar(self, tmp_path, exp_fn):
        path = write_testfn_csv(exp_fn, tmp_path / "exp.csv")
        (tmp_path / "exp.json").unlink()
        with pytest.raises(ParameterError):
            read_testfn_csv(path)
        assert read_testfn_csv(path, exp_fn.grid).sup_distance(exp_fn) == 0.0

    def test_wrong_grid(self, tmp_path, exp_fn, coarse_grid):
        path = write_testfn_csv(exp_fn, tmp_path / "exp.csv")
        with pytest.raises(ParameterError):
            read_testfn_csv(path, coarse_grid)


class TestDistributionFiles:

    def test_atoms_and_densities(self, tmp_path, exp_fn):
        f = delta_at(1.0, 1) + from_density(exp_fn) + from_density(exp_fn, 0.5)
        record = write_distribution(f, tmp_path, "f")
        assert record["atoms"] == [{"a": 1.0, "m": 1, "re": 1.0, "im": 0.0}]
        assert record["density"] == "f_density_0.csv"
        assert record["shifted_densities"] == [{"csv": "f_density_1.csv", "offset": 0.5}]
        assert read_json(tmp_path / "f.json") == record
        assert (tmp_path / "f_density_1.csv").is_file()

    def test_poly_test_dedupes_factors(self, tmp_path, exp_fn, gauss_fn):
        p = power_test(exp_fn, 2) + PolyTest(2, {2: [(0.5, (exp_fn, gauss_fn))]})
        manifest = write_poly_test(p, tmp_path, "p")
        assert manifest["max_degree"] == 2
        assert manifest["terms"]["0"] == [{"re": 1.0, "im": 0.0, "factors": []}]
        assert sorted(tmp_path.glob("p_factor_*.csv")) == [tmp_path / "p_factor_0.csv", tmp_path / "p_factor_1.csv"]

    def test_poly_dist_general_terms(self, tmp_path):
        D = poly_D_dist(power_dist(delta_at(1.0), 2))
        manifest = write_poly_dist(D, tmp_path, "D")
        assert manifest["scalar"] == {"re": 0.0, "im": 0.0}
        assert len(manifest["general"]["2"]) == 1
        assert len(manifest["general"]["2"][0]["factors"]) == 2
        for name in manifest["general"]["2"][0]["factors"]:
            assert (tmp_path / name).is_file()


class TestFockStateFiles:

    def test_round_trip(self, tmp_path, spatial):
        y = FockState.random_symmetric(11, (1, 2), spatial["L"], spatial["nodes_per_axis"])
        manifest = write_fock_state(y, tmp_path, "y")
        assert manifest["N"] == 2
        assert manifest["nodes_per_axis"] == {"1": 128, "2": 32}
        back = read_fock_state(tmp_path, "y")
        assert back.distance(y) == 0.0
        assert back.L == y.L

    def test_component_layout(self, tmp_path, spatial):
        y = FockState.gaussian((2,), spatial["L"], spatial["nodes_per_axis"])
        write_fock_state(y, tmp_path, "g")
        df = pd.read_csv(tmp_path / "g_component_2.csv")
        assert list(df.columns) == ["xi1", "xi2", "re", "im"]
        assert len(df) == 32 * 32
        # 第二个坐标变化最快
        assert df["xi1"].iloc[0] == df["xi1"].iloc[1]
        assert df["xi2"].iloc[0] != df["xi2"].iloc[1]

    def test_magnitude_table(self, tmp_path, spatial):
        y = FockState.gaussian((1,), spatial["L"], spatial["nodes_per_axis"])
        write_magnitude_csv(y, 1, tmp_path / "mag.csv", extra={"t": 0.5})
        df = pd.read_csv(tmp_path / "mag.csv")
        assert list(df.columns) == ["t", "xi1", "abs"]
        assert np.all(df["abs"] >= 0)


def test_freqfn_csv(tmp_path, exp_fn):
    fh = fourier_fn(exp_fn, xi_grid())
    write_freqfn_csv(fh, tmp_path / "fh.csv")
    df = pd.read_csv(tmp_path / "fh.csv")
    assert list(df.columns) == ["xi", "re", "im"]
    assert len(df) == 257
