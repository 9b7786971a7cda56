# tests/test_config.py
import textwrap

import pytest

from hardyprobe.config import ExperimentConfig, dump_config, load_config, parse_config
from hardyprobe.errors import ConfigError
from hardyprobe.hardy_core import Direction
from hardyprobe.inequalities import InequalityKind
from hardyprobe.kernels import KernelVariant
from hardyprobe.polar_space import DensityKind
from hardyprobe.weights import WeightExpr

VALID = textwrap.dedent("""\
    seed: 3
    spaces:
      - name: half
        kind: half_line
      - name: H3
        kind: hyperbolic
        dim: 3
    problems:
      - name: classical
        space: half
        p: 2
        q: 2
        phi: "r^-2"
        psi: 1
      - name: exponential
        space: H3
        p: 2
        q: 3
        direction: outer
        phi: "exp(-3*r)"
        psi_dual: {inner: "r^-1", outer: "exp(-3*r)", split: 1.0}
        family:
          kinds: [standard, fk]
          k_max: 8
    inequalities:
      - name: hs
        kind: hardy_sobolev
        params: {p: 2, q: 4, alpha: 0.4, beta: 0.2}
        kernel:
          variant: noncompact
          alpha: 0.4
    outputs:
      formats: [json]
""")


def test_parse_valid_config():
    """A full config is parsed and its entries build the numerical objects."""
    # 1. Parse
    config = parse_config(VALID)

    # 2. Check the sections
    assert isinstance(config, ExperimentConfig)
    assert config.seed == 3
    assert [p.name for p in config.problems] == ["classical", "exponential"]
    assert config.problems[1].direction == Direction.OUTER
    assert config.problems[1].family.kinds == ["standard", "fk"]
    assert config.outputs.formats == ["json"]
    assert config.outputs.dir == "hardyprobe_out"

    # 3. Build problems, specs and kernels
    classical = config.build_problem(config.problems[0])
    assert classical.name == "classical"
    assert classical.phi == WeightExpr(power=-2.0)
    assert classical.space.name == "half-line"
    exponential = config.build_problem(config.problems[1])
    assert exponential.space.kind == DensityKind.HYPERBOLIC
    assert exponential.psi_dual.eval(0.5) == pytest.approx(2.0)

    spec = config.build_spec(config.inequalities[0])
    assert spec.kind == InequalityKind.HARDY_SOBOLEV
    assert spec.q == 4.0
    kernel = config.build_kernel(config.inequalities[0])
    assert kernel.variant == KernelVariant.NONCOMPACT
    assert kernel.dim == 1.0


def test_empty_config_uses_defaults():
    config = parse_config("")
    assert config.problems == [] and config.inequalities == []
    assert config.tolerances.quad_tol == 1e-9
    assert config.sweep is None


def test_unknown_key_reports_its_position():
    text = VALID.replace('    psi: 1\n', '    psi: 1\n    bogus: 3\n')
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert "bogus" in str(exc.value)
    # the offending value sits on line 15 after "    bogus: "
    assert exc.value.line == 15
    assert exc.value.column == 12


def test_psi_and_psi_dual_are_exclusive():
    both = VALID.replace('    psi: 1\n', '    psi: 1\n    psi_dual: 1\n')
    with pytest.raises(ConfigError, match="exactly one"):
        parse_config(both)
    neither = VALID.replace('    psi: 1\n', '')
    with pytest.raises(ConfigError, match="exactly one"):
        parse_config(neither)


def test_malformed_weight_is_a_config_error():
    with pytest.raises(ConfigError) as exc:
        parse_config(VALID.replace('"r^-2"', '"r^x"'))
    assert exc.value.line == 13


@pytest.mark.parametrize("text,message", [
    ("problems: [\n", "Invalid YAML"),
    ("- 1\n- 2\n", "mapping"),
    ("outputs:\n  formats: [pdf]\n", "Invalid format"),
    ("inequalities:\n  - name: h\n    kind: hardy\n    params: {p: 2}\n", "takes exactly"),
    ("problems:\n  - name: x\n    space: nowhere\n    p: 2\n    q: 2\n    phi: 1\n    psi: 1\n", "unknown space"),
])
def test_invalid_configs(text, message):
    with pytest.raises(ConfigError, match=message):
        parse_config(text)


def test_environment_variables_are_expanded(monkeypatch):
    monkeypatch.setenv("HARDYPROBE_TEST_SEED", "41")
    assert parse_config("seed: ${HARDYPROBE_TEST_SEED}\n").seed == 41


def test_dump_round_trip():
    config = parse_config(VALID)
    assert parse_config(dump_config(config)) == config


def test_load_config_from_file(tmp_path):
    config_file = tmp_path / "experiment.yml"
    config_file.write_text(VALID)
    assert load_config(config_file).seed == 3


def test_missing_file_raises(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.yml")


def test_invalid_space_is_reported_when_built():
    config = parse_config("spaces:\n  - name: bad\n    kind: hyperbolic\n    dim: 1\n")
    with pytest.raises(ConfigError, match="bad"):
        config.space("bad")
