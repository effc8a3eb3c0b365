import json
import math

import numpy as np
import pytest

from CKNKit.cli.config import RunConfig, parse_formats, parse_grid
from CKNKit.cli.report import Report, Table, dumps, format_float, write_outputs
from CKNKit.exceptions import ConfigurationError, ValidationError
from CKNKit.exponents import Regime


class TestGrids:
    @pytest.mark.parametrize("text, expected", [
        ("0:1:3", (0.0, 0.5, 1.0)),
        ("1,2,3", (1.0, 2.0, 3.0)),
        ("3,2,1", (3.0, 2.0, 1.0)),
        ("4.5", (4.5,)),
        (2, (2.0,)),
        ([0.1, 0.2], (0.1, 0.2)),
    ])
    def test_valid(self, text, expected):
        assert parse_grid(text) == pytest.approx(expected)

    @pytest.mark.parametrize("text", ["", "1,1", "1,3,2", "a,b", "1:2", "0:1:0", "nan"])
    def test_invalid(self, text):
        with pytest.raises(ValidationError):
            parse_grid(text)

    def test_formats(self):
        assert parse_formats("csv,json") == ("csv", "json")
        with pytest.raises(ValidationError):
            parse_formats("xml")


class TestRunConfig:
    def test_defaults_and_params(self):
        config = RunConfig()
        assert config.params.regime is Regime.SUBCRITICAL
        with pytest.raises(ValidationError):
            config.scalar_p()

    def test_from_dict(self):
        config = RunConfig.from_dict({'mu2': -0.2, 'p': "5,9", 'quadrature': {'rel_tol': 1e-8}})
        assert config.p == (5.0, 9.0)
        assert config.quadrature.rel_tol == 1e-8
        assert config.sweep_grids() == ((0.0,), (-0.2,), (5.0, 9.0))
        with pytest.raises(ValidationError):
            config.scalar_p()

    def test_unknown_keys(self):
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict({'mu3': 1.0})
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict({'quadrature': {'tolerance': 1.0}})
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict({'quadrature': 1e-8})

    def test_validation(self):
        with pytest.raises(ValidationError):
            RunConfig(domain_radius=0.0)
        with pytest.raises(ValidationError):
            RunConfig(mu1=math.inf)
        with pytest.raises(ValidationError):
            RunConfig(workers=0)

    def test_report_echo_leaves_out_runtime_fields(self):
        echo = RunConfig(workers=4, log_level="DEBUG").to_dict()
        assert not set(RunConfig.RUNTIME_FIELDS) & set(echo)
        assert echo['quadrature']['rel_tol'] == 1e-10


class TestSerialization:
    def test_float_format(self):
        assert format_float(0.1) == "0.10000000000000001"
        assert format_float(-math.inf) == "-inf"
        assert format_float(math.nan) == "nan"

    def test_dumps_is_sorted_and_parsable(self):
        text = dumps({'b': np.float64(1.5), 'a': [Regime.CRITICAL, math.inf, None, True]})
        assert text == '{\n  "a": [\n    "Critical",\n    "inf",\n    null,\n    true\n  ],\n  "b": 1.5\n}\n'
        assert json.loads(text)['a'][1] == "inf"

    def test_table_csv(self):
        table = Table("t", ("x", "flag", "note"), [{'x': 0.5, 'flag': False, 'note': None}])
        assert table.to_csv() == "x,flag,note\n0.5,false,\n"

    def test_write_outputs(self, tmp_path):
        report = Report("exponents", {'N': 3.0}, {'regime': "Subcritical"}, version="1.0.0")
        table = Table("exponents", ("a",), [{'a': 1}])
        written = write_outputs(report, [table], ("csv", "json"), tmp_path / "run")
        assert sorted(p.name for p in written) == ["exponents.csv", "exponents.json"]
        assert json.loads((tmp_path / "run" / "exponents.json").read_text())['results']['regime'] == "Subcritical"
