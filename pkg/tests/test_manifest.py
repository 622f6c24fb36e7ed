import pytest

from fracac.manifest import ConfigError, parse_config

CONVERGENCE = """\
# smooth-case convergence study
kind=convergence
alpha=1.5
eps=0.1
dt=0.0625   # halved per level
t_end=1.0
mx=16
levels=3
"""

SIMULATE = """\
kind=simulate
alpha=1.6
eps=0.1
dt=0.4
t_end=80.0
mx=20
seed=42
ic_scale=0.95
ic_offset=0.05
snapshots=5,20,40,80
"""


class TestParsing:
    def test_complete_convergence_manifest(self):
        m = parse_config(CONVERGENCE)
        assert m.kind == "convergence"
        assert m.alpha == 1.5
        assert m.sizes == (16, 16)
        assert m.levels == 3
        assert m.order == 4

    def test_complete_simulate_manifest(self):
        m = parse_config(SIMULATE)
        assert m.kind == "simulate"
        assert m.snapshots == (5.0, 20.0, 40.0, 80.0)
        assert m.seed == 42
        cfg = m.solver_config()
        assert cfg.sizes == (20, 20)
        assert cfg.n_steps() == 200

    def test_comments_and_blanks_ignored(self):
        text = "\n# header\nkind=window\n\nalpha=1.6 # inline\neps=0.1\nmx=20\n"
        m = parse_config(text)
        assert m.alpha == 1.6

    def test_unequal_grid(self):
        text = "kind=window\nalpha=1.5\neps=0.1\nmx=16\nmy=20\nmz=32\n"
        assert parse_config(text).sizes == (16, 20, 32)

    def test_my_defaults_to_mx(self):
        text = "kind=window\nalpha=1.5\neps=0.1\nmx=16\n"
        assert parse_config(text).sizes == (16, 16)

    def test_amplification_keys(self):
        text = "kind=amplification\nalpha=1.7\nbetas=0.5 2.0\nm=32\nphases=64\n"
        m = parse_config(text)
        assert m.betas == (0.5, 2.0)
        assert m.amp_m == 32
        assert m.phases == 64


class TestValidation:
    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown key 'foo'"):
            parse_config(CONVERGENCE + "foo=1\n")

    def test_key_wrong_kind(self):
        with pytest.raises(ConfigError, match="'levels' is not valid"):
            parse_config(SIMULATE + "levels=3\n")

    def test_alpha_domain_names_key(self):
        with pytest.raises(ConfigError, match="alpha"):
            parse_config(CONVERGENCE.replace("alpha=1.5", "alpha=2.5"))

    def test_missing_required(self):
        with pytest.raises(ConfigError, match="missing required key 'eps'"):
            parse_config("kind=convergence\nalpha=1.5\ndt=0.1\nt_end=1.0\nmx=8\n")

    def test_missing_kind(self):
        with pytest.raises(ConfigError, match="kind"):
            parse_config("alpha=1.5\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config(CONVERGENCE + "alpha=1.4\n")

    def test_not_key_value(self):
        with pytest.raises(ConfigError, match="key=value"):
            parse_config("kind window\n")

    def test_bad_step_count(self):
        with pytest.raises(ConfigError, match="integer step count"):
            parse_config(SIMULATE.replace("dt=0.4", "dt=0.3"))

    def test_extrapolate_odd_steps(self):
        text = (
            "kind=simulate\nalpha=1.5\neps=0.1\ndt=1.0\nt_end=3.0\nmx=8\n"
            "ic_scale=0.1\nic_offset=-0.05\nextrapolate=true\n"
        )
        with pytest.raises(ConfigError, match="even step count"):
            parse_config(text)

    def test_convergence_needs_even_steps(self):
        with pytest.raises(ConfigError, match="even base step count"):
            parse_config(
                "kind=convergence\nalpha=1.5\neps=0.1\ndt=1.0\nt_end=3.0\nmx=8\n"
            )

    def test_random_needs_scale_offset(self):
        text = "kind=simulate\nalpha=1.5\neps=0.1\ndt=0.5\nt_end=1.0\nmx=8\n"
        with pytest.raises(ConfigError, match="ic_scale"):
            parse_config(text)

    def test_file_initial_needs_path(self):
        text = (
            "kind=simulate\nalpha=1.5\neps=0.1\ndt=0.5\nt_end=1.0\nmx=8\n"
            "initial=file\n"
        )
        with pytest.raises(ConfigError, match="initial_file"):
            parse_config(text)

    def test_snapshot_beyond_t_end(self):
        with pytest.raises(ConfigError, match="beyond t_end"):
            parse_config(SIMULATE.replace("snapshots=5,20,40,80", "snapshots=81"))

    def test_bad_bool(self):
        text = SIMULATE + "extrapolate=yes\n"
        with pytest.raises(ConfigError, match="true or false"):
            parse_config(text)

    def test_bad_variant(self):
        text = "kind=window\nalpha=1.5\neps=0.1\nmx=8\nvariant=nope\n"
        with pytest.raises(ConfigError, match="variant"):
            parse_config(text)

    def test_grid_too_small(self):
        with pytest.raises(ConfigError, match="mx"):
            parse_config("kind=window\nalpha=1.5\neps=0.1\nmx=1\n")

    def test_my_without_mx(self):
        with pytest.raises(ConfigError, match="missing required key 'mx'"):
            parse_config("kind=window\nalpha=1.5\neps=0.1\nmy=8\n")

    def test_bad_order(self):
        with pytest.raises(ConfigError, match="order"):
            parse_config(CONVERGENCE + "order=3\n")

    def test_negative_eps(self):
        with pytest.raises(ConfigError, match="eps"):
            parse_config(CONVERGENCE.replace("eps=0.1", "eps=-0.1"))
