import json

import numpy as np
import pytest

from conftest import random_local_product, stream
from tpsdist import (BuiltModel, DenseOperator, ExperimentRecord,
                     LongTimeAverage, SizeError, TensorFactorization,
                     build_tfim, default_time_grid, fig1_pipeline,
                     fig2_pipeline, fig3_pipeline, full_tps,
                     long_time_average, phi_time_series, resonance_average,
                     short_time_coefficient, window_average, write_record,
                     write_table)


def zero_model(dims):
    d = int(np.prod(dims))
    return BuiltModel("tfim", DenseOperator.hermitian(np.zeros((d, d))),
                      TensorFactorization(dims), {}, "null")


class TestPhiTimeSeries:
    def test_starts_at_zero(self):
        model = build_tfim(3, 0.5, 1.05)
        rec = phi_time_series(model, full_tps([2, 2, 2]), [0.0, 0.4])
        assert rec.series["phi"][0] < 1e-12
        assert rec.times == (0.0, 0.4)

    def test_single_site_hamiltonian_stays_at_zero(self):
        model = build_tfim(3, 0.3, 0.9, zz_coupling=0.0)
        rec = phi_time_series(model, full_tps([2, 2, 2]), [0.0, 1.0, 10.0, 50.0])
        assert max(rec.series["phi"]) < 1e-12

    def test_conjugation_by_local_product_is_invisible(self):
        rng = stream(70)
        dims = [2, 2, 2]
        model = build_tfim(3, 0.5, 1.05)
        v = random_local_product(dims, rng)
        h2 = v @ model.hamiltonian.matrix @ v.conj().T
        rotated = BuiltModel("tfim", DenseOperator.hermitian((h2 + h2.conj().T) / 2),
                             TensorFactorization(dims), {}, "rotated")
        times = [0.0, 0.3, 1.2, 7.0]
        aset = full_tps(dims)
        a = phi_time_series(model, aset, times).series["phi"]
        b = phi_time_series(rotated, aset, times).series["phi"]
        assert max(abs(x - y) for x, y in zip(a, b)) < 1e-10

    def test_short_time_coefficient_predicts_series(self):
        model = build_tfim(4, 0.5, 1.05)
        aset = full_tps([2] * 4)
        c2 = short_time_coefficient(model.hamiltonian, aset)
        t = 1e-3
        phi = phi_time_series(model, aset, [t]).series["phi"][0]
        assert abs(phi / t**2 - c2) < 1e-2 * c2

    def test_threads_do_not_change_values(self):
        model = build_tfim(3, 0.5, 1.05)
        aset = full_tps([2, 2, 2])
        times = [0.0, 0.5, 2.0, 9.0]
        a = phi_time_series(model, aset, times, threads=1).series["phi"]
        b = phi_time_series(model, aset, times, threads=3).series["phi"]
        assert a == b

    def test_time_validation(self):
        model = build_tfim(2, 0.0, 1.0)
        aset = full_tps([2, 2])
        with pytest.raises(ValueError):
            phi_time_series(model, aset, [])
        with pytest.raises(ValueError):
            phi_time_series(model, aset, [-0.5])
        with pytest.raises(ValueError):
            phi_time_series(model, aset, [float("nan")])

    def test_default_grid_shape(self):
        grid = default_time_grid()
        assert grid[0] == 0.0
        assert grid[-1] == 100.0
        assert len(grid) == 102
        assert all(b > a for a, b in zip(grid, grid[1:]))


class TestAverages:
    def test_window_average_constant(self):
        mean, err, ok = window_average([0.3] * 20)
        assert mean == pytest.approx(0.3)
        assert err == pytest.approx(0.0)
        assert ok

    def test_window_average_flags_drift(self):
        mean, err, ok = window_average(np.linspace(0.0, 1.0, 20))
        assert not ok

    def test_long_time_average_fields(self):
        model = build_tfim(3, 0.5, 1.05)
        lt = long_time_average(model, full_tps([2, 2, 2]),
                               window=(20.0, 120.0), n_samples=32)
        assert isinstance(lt, LongTimeAverage)
        assert lt.window == (20.0, 120.0)
        assert lt.n_samples == 32
        assert 0.0 < lt.value < 1.0
        assert lt.stderr > 0.0
        assert isinstance(lt.converged, bool)

    def test_long_time_average_validation(self):
        model = build_tfim(2, 0.0, 1.0)
        aset = full_tps([2, 2])
        with pytest.raises(ValueError):
            long_time_average(model, aset, window=(5.0, 5.0))
        with pytest.raises(ValueError):
            long_time_average(model, aset, window=(-1.0, 5.0))
        with pytest.raises(ValueError):
            long_time_average(model, aset, n_samples=8)


class TestResonanceAverage:
    def test_zero_hamiltonian(self):
        assert resonance_average(zero_model([2, 2]), full_tps([2, 2])) < 1e-12

    def test_matches_window_average(self):
        model = build_tfim(4, 0.5, 1.05)
        aset = full_tps([2] * 4)
        exact = resonance_average(model, aset)
        lt = long_time_average(model, aset, window=(50.0, 500.0), n_samples=128)
        assert abs(exact - lt.value) < 0.02

    def test_size_cap(self):
        with pytest.raises(SizeError):
            resonance_average(zero_model([2] * 9), full_tps([2] * 9))

    def test_dimension_mismatch(self):
        model = build_tfim(3, 0.5, 1.05)
        with pytest.raises(ValueError):
            resonance_average(model, full_tps([2, 2]))


class TestRecordsAndFiles:
    def test_record_validates_column_lengths(self):
        with pytest.raises(ValueError):
            ExperimentRecord({}, (0.0, 1.0), {"phi": (0.0,)})

    def test_write_record_bytes_and_sidecar(self, tmp_path):
        rec = ExperimentRecord({"kind": "unit"}, (0.0, 0.5),
                               {"phi": (0.0, 0.125)}, {"note_val": 1.0})
        path = write_record(rec, tmp_path, "unit", wall_clock=0.25)
        assert path.read_text() == "t,phi\n0.0,0.0\n0.5,0.125\n"
        meta = json.loads((tmp_path / "unit.json").read_text())
        assert meta["config"] == {"kind": "unit"}
        assert meta["aggregates"] == {"note_val": 1.0}
        assert meta["wall_clock_s"] == 0.25
        assert "version" in meta and "written_at" in meta

    def test_write_table_cell_formats(self, tmp_path):
        rows = [{"name": "x", "ok": True, "val": 0.5, "n": 3},
                {"name": "y", "ok": False, "val": 1.0 / 3.0, "n": 4}]
        path = write_table(rows, ["name", "ok", "val", "n"], tmp_path,
                           "cells", {"kind": "unit"})
        lines = path.read_text().splitlines()
        assert lines[0] == "name,ok,val,n"
        assert lines[1] == "x,true,0.5,3"
        assert lines[2] == "y,false," + repr(1.0 / 3.0) + ",4"
        assert (tmp_path / "cells.json").exists()

    def test_rewrite_is_byte_identical(self, tmp_path):
        rec = ExperimentRecord({"kind": "unit"}, (0.0, 1.0),
                               {"phi": (0.0, 0.4)})
        a = write_record(rec, tmp_path / "a", "run").read_bytes()
        b = write_record(rec, tmp_path / "b", "run").read_bytes()
        assert a == b


class TestFig1Pipeline:
    def test_tiny_run(self, tmp_path):
        grid = [0.0, 0.3, 0.7, 2.0]
        records = fig1_pipeline(n_sites=3, n1=1, grid=grid, outdir=tmp_path)
        assert sorted(records) == ["integrable", "nonintegrable"]
        for regime, rec in records.items():
            assert len(rec.series["phi"]) == len(grid)
            assert rec.series["phi"][0] < 1e-12
            assert rec.series["ep"][0] < 1e-12
            assert "pearson_r" in rec.aggregates
            assert "max_abs_gap" in rec.aggregates
            assert (tmp_path / f"fig1_{regime}.csv").exists()
            assert (tmp_path / f"fig1_{regime}.json").exists()

    def test_bad_bipartition(self):
        with pytest.raises(ValueError):
            fig1_pipeline(n_sites=3, n1=3, grid=[0.0])


class TestFig2Pipeline:
    def test_tiny_run_and_single_cluster_shortcut(self, tmp_path):
        rows = fig2_pipeline(n_sites=4, clusters=(1, 2), window=(5.0, 20.0),
                             n_samples=16, outdir=tmp_path)
        assert len(rows) == 4
        for row in rows:
            if row["m"] == 1:
                assert row["phi_bar"] == 0.0
                assert row["haar_ref"] == 0.0
            else:
                assert 0.0 < row["phi_bar"] <= 1.0
                assert 0.0 < row["haar_ref"] < 1.0
        for m in (1, 2):
            assert (tmp_path / f"fig2_m{m}.csv").exists()
        header = (tmp_path / "fig2_m2.csv").read_text().splitlines()[0]
        assert header == "regime,m,phi_bar,phi_stderr,haar_ref,converged"

    def test_rejects_non_divisor(self):
        with pytest.raises(ValueError):
            fig2_pipeline(n_sites=4, clusters=(3,), window=(5.0, 20.0),
                          n_samples=16)


class TestFig3Pipeline:
    def test_tiny_run_is_deterministic(self, tmp_path):
        kwargs = dict(tfim_sizes=(3,), chain_sizes=(2,), window=(5.0, 20.0),
                      n_samples=16, seed=3)
        rows_a = fig3_pipeline(outdir=tmp_path / "a", **kwargs)
        rows_b = fig3_pipeline(outdir=tmp_path / "b", **kwargs)
        assert rows_a == rows_b
        bytes_a = (tmp_path / "a" / "fig3_scaling.csv").read_bytes()
        bytes_b = (tmp_path / "b" / "fig3_scaling.csv").read_bytes()
        assert bytes_a == bytes_b
        families = [row["family"] for row in rows_a]
        assert families == ["tfim_nonintegrable", "tfim_integrable",
                            "tfim_anderson", "tfim_mbl",
                            "temperley_lieb", "tjz"]
        disordered = [r for r in rows_a if "anderson" in r["family"]
                      or "mbl" in r["family"]]
        assert all(r["realizations"] == 66 for r in disordered)
