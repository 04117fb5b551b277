import numpy as np
import pytest

from conftest import stream
from tpsdist import (BuiltModel, ModelConfig, SeededGenerator, SizeError,
                     build_model, build_temperley_lieb, build_tfim, build_tjz,
                     disorder_repetitions, sample_disorder,
                     tfim_regime_couplings)

SZ = np.diag([1.0, -1.0])
SX = np.array([[0.0, 1.0], [1.0, 0.0]])
I2 = np.eye(2)


def kron_chain(*ops):
    out = ops[0]
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


class TestTfim:
    def test_two_site_coupling_spectrum(self):
        model = build_tfim(2, 0.0, [0.0, 0.0])
        evals = np.linalg.eigvalsh(model.hamiltonian.matrix)
        assert np.allclose(evals, [-1.0, -1.0, 1.0, 1.0], atol=1e-14)

    def test_matches_explicit_kron_sum(self):
        h, g = 0.5, [1.05, 0.3, 2.0]
        model = build_tfim(3, h, g)
        want = (-kron_chain(SZ, SZ, I2) - kron_chain(I2, SZ, SZ)
                - h * (kron_chain(SZ, I2, I2) + kron_chain(I2, SZ, I2)
                       + kron_chain(I2, I2, SZ))
                - g[0] * kron_chain(SX, I2, I2)
                - g[1] * kron_chain(I2, SX, I2)
                - g[2] * kron_chain(I2, I2, SX))
        assert np.max(np.abs(model.hamiltonian.matrix - want)) < 1e-14

    def test_spectrum_symmetric_without_longitudinal_field(self):
        model = build_tfim(4, 0.0, 1.0)
        evals = np.sort(np.linalg.eigvalsh(model.hamiltonian.matrix))
        assert np.max(np.abs(evals + evals[::-1])) < 1e-12

    def test_zz_coupling_scales_bond_term(self):
        strong = build_tfim(2, 0.0, [0.0, 0.0], zz_coupling=2.5)
        evals = np.linalg.eigvalsh(strong.hamiltonian.matrix)
        assert np.allclose(evals, [-2.5, -2.5, 2.5, 2.5], atol=1e-14)
        off = build_tfim(3, 0.3, 0.7, zz_coupling=0.0)
        single = (-0.3 * sum(kron_chain(*[SZ if k == s else I2 for k in range(3)])
                             for s in range(3))
                  - 0.7 * sum(kron_chain(*[SX if k == s else I2 for k in range(3)])
                              for s in range(3)))
        assert np.max(np.abs(off.hamiltonian.matrix - single)) < 1e-14

    def test_scalar_g_broadcasts(self):
        a = build_tfim(3, 0.0, 1.05)
        b = build_tfim(3, 0.0, [1.05, 1.05, 1.05])
        assert np.array_equal(a.hamiltonian.matrix, b.hamiltonian.matrix)

    def test_real_dtype_and_metadata(self):
        model = build_tfim(3, 0.5, 1.05)
        assert model.hamiltonian.matrix.dtype == np.float64
        assert model.fact.dims == (2, 2, 2)
        assert model.dim == 8
        assert model.n_sites == 3
        assert model.label == "tfim_N3"
        assert model.leakage is None

    def test_g_length_mismatch(self):
        with pytest.raises(ValueError):
            build_tfim(3, 0.0, [1.0, 2.0])

    def test_regime_presets(self):
        non = tfim_regime_couplings("nonintegrable", 4)
        assert non == {"h": 0.5, "g": [1.05] * 4}
        integ = tfim_regime_couplings("integrable", 4)
        assert integ == {"h": 0.0, "g": [1.0] * 4}
        anderson = tfim_regime_couplings("anderson", 4, stream(60))
        assert anderson["h"] == 0.0
        assert len(anderson["g"]) == 4
        assert all(-10.0 <= v <= 10.0 for v in anderson["g"])
        mbl = tfim_regime_couplings("mbl", 4, stream(61))
        assert mbl["h"] == 0.5

    def test_disordered_regime_needs_generator(self):
        with pytest.raises(ValueError):
            tfim_regime_couplings("anderson", 4)
        with pytest.raises(ValueError):
            tfim_regime_couplings("chaotic", 4)


class TestTemperleyLieb:
    def test_two_site_spectrum(self):
        model = build_temperley_lieb(2, [1.0])
        evals = np.sort(np.linalg.eigvalsh(model.hamiltonian.matrix))
        want = np.concatenate([np.zeros(8), [3.0]])
        assert np.max(np.abs(evals - want)) < 1e-13

    def test_bond_projector_relation(self):
        # each bond generator satisfies e^2 = 3 e, visible through a chain
        # with a single active bond
        single = build_temperley_lieb(3, [1.0, 0.0]).hamiltonian.matrix
        assert np.max(np.abs(single @ single - 3.0 * single)) < 1e-13

    def test_trace_scaling(self):
        two = build_temperley_lieb(2, [0.4])
        assert abs(np.trace(two.hamiltonian.matrix) - 3 * 0.4) < 1e-13
        js = [0.4, 1.1]
        three = build_temperley_lieb(3, js)
        assert abs(np.trace(three.hamiltonian.matrix) - 3 * sum(js) * 3) < 1e-12

    def test_metadata_and_validation(self):
        model = build_temperley_lieb(3, [1.0, 0.5])
        assert model.fact.dims == (3, 3, 3)
        assert model.hamiltonian.matrix.dtype == np.float64
        with pytest.raises(ValueError):
            build_temperley_lieb(4, [1.0, 0.5])


class TestTjz:
    def test_hopping_sign_convention(self):
        # constrained basis at N=2 orders trits site-0 first with
        # 0 = empty, 1 = up, 2 = down, so index 1 = |empty, up> and
        # index 3 = |up, empty>
        model = build_tjz(2, [1.0], [0.0], [0.0, 0.0], [0.0, 0.0])
        h = model.hamiltonian.matrix
        assert h.shape == (9, 9)
        assert abs(h[3, 1] - 1.0) < 1e-14
        assert abs(h[1, 3] - 1.0) < 1e-14
        assert abs(h[6, 2] - 1.0) < 1e-14

    def test_no_hopping_is_diagonal(self):
        model = build_tjz(2, [0.0], [0.7], [0.2, 0.9], [0.1, 0.3])
        h = model.hamiltonian.matrix
        assert np.max(np.abs(h - np.diag(np.diagonal(h)))) < 1e-14
        assert model.leakage == 0.0

    def test_diagonal_values(self):
        jz, hz, gz = 0.7, (0.2, 0.9), (0.1, 0.3)
        model = build_tjz(2, [0.0], [jz], hz, gz)
        h = model.hamiltonian.matrix
        sz_of = {0: 0.0, 1: 1.0, 2: -1.0}
        for t0 in range(3):
            for t1 in range(3):
                s0, s1 = sz_of[t0], sz_of[t1]
                want = (jz * s0 * s1 + hz[0] * s0 + hz[1] * s1
                        + gz[0] * s0**2 + gz[1] * s1**2)
                assert abs(h[t0 * 3 + t1, t0 * 3 + t1] - want) < 1e-13

    def test_leakage_of_pure_hopping(self):
        model = build_tjz(2, [1.0], [0.0], [0.0, 0.0], [0.0, 0.0])
        assert abs(model.leakage - 2.0) < 1e-12

    def test_conserves_particle_number_and_spin(self):
        model = build_tjz(3, [0.7, 0.3], [0.2, 0.4], [0.1, 0.5, 0.9],
                          [0.3, 0.2, 0.6])
        h = model.hamiltonian.matrix
        d = 27
        sz_of = np.array([0.0, 1.0, -1.0])
        n_of = np.array([0.0, 1.0, 1.0])
        idx = np.arange(d)
        trits = np.stack([(idx // 3 ** (2 - k)) % 3 for k in range(3)])
        sz_tot = np.diag(sz_of[trits].sum(axis=0))
        n_tot = np.diag(n_of[trits].sum(axis=0))
        assert np.max(np.abs(h @ sz_tot - sz_tot @ h)) < 1e-12
        assert np.max(np.abs(h @ n_tot - n_tot @ h)) < 1e-12

    def test_size_cap_and_length_validation(self):
        with pytest.raises(SizeError):
            build_tjz(8, [1.0] * 7, [0.0] * 7, [0.0] * 8, [0.0] * 8)
        with pytest.raises(ValueError):
            build_tjz(4, [1.0, 1.0], [0.0] * 3, [0.0] * 4, [0.0] * 4)
        with pytest.raises(ValueError):
            build_tjz(3, [1.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0] * 3)


class TestDisorder:
    def test_sample_shapes_and_ranges(self):
        rng = stream(62)
        tfim = sample_disorder("tfim", 5, rng)
        assert len(tfim["g"]) == 5
        assert all(-10.0 <= v <= 10.0 for v in tfim["g"])
        tl = sample_disorder("temperley_lieb", 5, rng)
        assert len(tl["J"]) == 4
        assert all(0.0 <= v <= 1.0 for v in tl["J"])
        tjz = sample_disorder("tjz", 5, rng)
        assert sorted(tjz) == ["Jz", "gz", "hz", "t"]
        assert len(tjz["t"]) == len(tjz["Jz"]) == 4
        assert len(tjz["hz"]) == len(tjz["gz"]) == 5
        with pytest.raises(ValueError):
            sample_disorder("heisenberg", 5, rng)

    def test_repetition_budget(self):
        assert disorder_repetitions(10) == 20
        assert disorder_repetitions(3) == 66
        assert disorder_repetitions(300) == 1


class TestModelConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ModelConfig("heisenberg", 4)
        with pytest.raises(ValueError):
            ModelConfig("tfim", 1)
        with pytest.raises(ValueError):
            ModelConfig("temperley_lieb", 4, regime="integrable")
        with pytest.raises(ValueError):
            ModelConfig("tfim", 4, regime="chaotic")
        with pytest.raises(ValueError):
            ModelConfig("tfim", 4, couplings={"J": [1.0]})

    def test_mapping_round_trip_tfim(self):
        cfg = ModelConfig("tfim", 3, couplings={"h": 0.5, "g": [1.0, 2.0, 3.0],
                                                "zz_coupling": 1.0})
        flat = cfg.to_mapping()
        assert flat["family"] == "tfim"
        assert flat["n_sites"] == "3"
        assert flat["g"] == "1.0,2.0,3.0"
        back = ModelConfig.from_mapping(flat)
        assert back == cfg

    def test_mapping_round_trip_regime_and_seed(self):
        cfg = ModelConfig("tfim", 4, regime="mbl", disorder_seed=9)
        back = ModelConfig.from_mapping(cfg.to_mapping())
        assert back == cfg

    def test_mapping_rejects_unknown_key(self):
        with pytest.raises(ValueError):
            ModelConfig.from_mapping({"family": "tfim", "n_sites": "3",
                                      "J": "1.0"})


class TestBuildModel:
    def test_explicit_couplings_win_over_regime(self):
        cfg = ModelConfig("tfim", 3, regime="nonintegrable",
                          couplings={"h": 0.0, "g": [2.0, 2.0, 2.0]})
        model = build_model(cfg)
        direct = build_tfim(3, 0.0, [2.0] * 3)
        assert np.array_equal(model.hamiltonian.matrix,
                              direct.hamiltonian.matrix)

    def test_regime_resolution_and_label(self):
        model = build_model(ModelConfig("tfim", 3, regime="nonintegrable"))
        direct = build_tfim(3, 0.5, [1.05] * 3)
        assert np.array_equal(model.hamiltonian.matrix,
                              direct.hamiltonian.matrix)
        assert model.label == "tfim_nonintegrable_N3"

    def test_disorder_seed_determinism(self):
        cfg = ModelConfig("temperley_lieb", 3, disorder_seed=5)
        a = build_model(cfg)
        b = build_model(cfg)
        c = build_model(ModelConfig("temperley_lieb", 3, disorder_seed=6))
        assert isinstance(a, BuiltModel)
        assert np.array_equal(a.hamiltonian.matrix, b.hamiltonian.matrix)
        assert not np.array_equal(a.hamiltonian.matrix, c.hamiltonian.matrix)

    def test_explicit_generator_overrides_seed(self):
        cfg = ModelConfig("tjz", 3, disorder_seed=5)
        seeded = build_model(cfg)
        external = build_model(cfg, rng=SeededGenerator(99).stream(0))
        assert not np.array_equal(seeded.hamiltonian.matrix,
                                  external.hamiltonian.matrix)

    def test_missing_inputs_raise(self):
        with pytest.raises(ValueError):
            build_model(ModelConfig("tfim", 3))
        with pytest.raises(ValueError):
            build_model(ModelConfig("temperley_lieb", 3))
        with pytest.raises(ValueError):
            build_model(ModelConfig("tjz", 3, couplings={"t": [1.0, 1.0]}))
