import pytest
import yaml
from typer.main import get_command

from hardyprobe.cli_plugins.template import template_app
from hardyprobe.templates.registry import (
    CATEGORIES,
    TEMPLATES,
    by_category,
    get_template,
    load_template_yaml,
)

COMMANDS = {"validate", "bconst", "check", "sweep"}


def test_registry_has_5_templates():
    assert len(TEMPLATES) == 5


def test_all_templates_have_required_fields():
    for name, t in TEMPLATES.items():
        assert t.name == name
        assert t.description
        assert t.category in CATEGORIES
        assert t.command in COMMANDS
        assert t.settings and t.capabilities
        assert t.path.is_file()


def test_unknown_template():
    with pytest.raises(KeyError, match="not found"):
        get_template("nope")


def test_categories_are_grouped_in_display_order():
    grouped = by_category()
    assert [title for title, _ in grouped] == list(CATEGORIES.values())
    assert sum(len(members) for _, members in grouped) == len(TEMPLATES)
    constants = [t.name for t in grouped[0][1]]
    assert constants == sorted(constants)


@pytest.mark.parametrize("template_name", TEMPLATES.keys())
def test_templates_are_valid_configs(template_name):
    yaml_content = load_template_yaml(template_name)
    assert isinstance(yaml.safe_load(yaml_content), dict)
    config = get_template(template_name).config()
    for problem in config.problems:
        config.build_problem(problem)
    for inequality in config.inequalities:
        config.build_spec(inequality)


@pytest.mark.parametrize("template_name", TEMPLATES.keys())
def test_templates_contain_inline_markers(template_name):
    yaml_content = load_template_yaml(template_name)
    assert "# UPDATE THIS" in yaml_content
    assert "HOW TO USE" in yaml_content


def test_sweep_templates_carry_a_sweep_section():
    for t in TEMPLATES.values():
        if t.command == "sweep":
            assert t.config().sweep is not None


def test_seed_override_keeps_the_comment():
    text = load_template_yaml("sandwich_suite", seed=42)
    assert "seed: 42" in text
    assert "# UPDATE THIS" in text.split("seed: 42", 1)[1].splitlines()[0]
    assert get_template("sandwich_suite").config().seed == 7


def test_run_line():
    assert get_template("hardy_sobolev_stability").run_line() == \
        "hardyprobe check --config experiment.yml --expect-unbounded"
    assert get_template("classical_hardy").run_line("x.yml") == "hardyprobe bconst --config x.yml"


def test_template_list_command(cli_runner):
    command = get_command(template_app)
    result = cli_runner.invoke(command, ["list"])
    assert result.exit_code == 0
    assert "AVAILABLE TEMPLATES" in result.output


def test_template_info_command(cli_runner):
    command = get_command(template_app)
    result = cli_runner.invoke(command, ["info", "critical_boundary"])
    assert result.exit_code == 0
    assert "critical_boundary" in result.output
    assert "CAPABILITIES" in result.output
    assert "ENTRIES" in result.output


def test_template_info_unknown(cli_runner):
    command = get_command(template_app)
    result = cli_runner.invoke(command, ["info", "nope"])
    assert result.exit_code == 1


def test_template_generate_command(cli_runner):
    command = get_command(template_app)
    result = cli_runner.invoke(command, ["generate", "classical_hardy"])
    assert result.exit_code == 0

    parsed = yaml.safe_load(result.output)
    assert parsed["problems"][0]["name"] == "classical"
    assert parsed["problems"][0]["phi"] == "r^-2"


def test_template_generate_to_file(cli_runner, tmp_path):
    command = get_command(template_app)
    target = tmp_path / "experiment.yml"

    # 1. First write succeeds
    result = cli_runner.invoke(command, ["generate", "sandwich_suite", "-o", str(target), "--seed", "3"])
    assert result.exit_code == 0
    assert yaml.safe_load(target.read_text())["seed"] == 3

    # 2. An existing file is not overwritten
    result = cli_runner.invoke(command, ["generate", "sandwich_suite", "-o", str(target)])
    assert result.exit_code == 1
    assert yaml.safe_load(target.read_text())["seed"] == 3
