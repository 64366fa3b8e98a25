import json

import numpy as np
import pytest

from src.utils.exceptions import InputFormatError
from src.utils.input_loader import load_density, load_discrete


@pytest.fixture
def density_json(tmp_path):
    path = tmp_path / "tent.json"
    path.write_text(json.dumps({"x_min": -1.0, "x_max": 1.0, "values": [0.0, 0.5, 1.0, 0.5, 0.0]}))
    return path


class TestLoadDensity:
    def test_json(self, density_json):
        """JSON densities keep their grid"""
        density = load_density(density_json)
        assert density.grid_info() == {"x_min": -1.0, "x_max": 1.0, "n": 5}
        np.testing.assert_array_equal(density.values, [0.0, 0.5, 1.0, 0.5, 0.0])
        assert density.label == "tent"

    def test_csv_with_header(self, tmp_path):
        """A header row is skipped"""
        path = tmp_path / "p.csv"
        path.write_text("x,p\n0.0,1.0\n0.5,1.0\n1.0,1.0\n")
        density = load_density(path)
        assert density.n == 3
        assert density.x_max == 1.0

    def test_missing_field(self, tmp_path):
        """The offending key is named"""
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"x_min": 0.0, "values": [1.0, 1.0, 1.0]}))
        with pytest.raises(InputFormatError) as excinfo:
            load_density(path)
        assert excinfo.value.field == "x_max"

    def test_malformed_json(self, tmp_path):
        """Broken JSON is an input error"""
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(InputFormatError):
            load_density(path)

    def test_non_numeric_values(self, tmp_path):
        """Values must be numbers"""
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"x_min": 0.0, "x_max": 1.0, "values": [1.0, "a", 1.0]}))
        with pytest.raises(InputFormatError) as excinfo:
            load_density(path)
        assert excinfo.value.field == "values"

    def test_boolean_values(self, tmp_path):
        """JSON booleans are not numbers"""
        path = tmp_path / "flags.json"
        path.write_text(json.dumps({"x_min": 0.0, "x_max": 1.0, "values": [1.0, True, 1.0]}))
        with pytest.raises(InputFormatError) as excinfo:
            load_density(path)
        assert excinfo.value.field == "values"

        path.write_text(json.dumps({"x_min": False, "x_max": 1.0, "values": [1.0, 1.0, 1.0]}))
        with pytest.raises(InputFormatError) as excinfo:
            load_density(path)
        assert excinfo.value.field == "x_min"

    def test_uneven_grid(self, tmp_path):
        """CSV grids must be uniform"""
        path = tmp_path / "p.csv"
        path.write_text("0.0,1.0\n0.5,1.0\n2.0,1.0\n")
        with pytest.raises(InputFormatError) as excinfo:
            load_density(path)
        assert excinfo.value.field == "x"

    def test_garbage_line(self, tmp_path):
        """Non-numeric rows after the first are reported by line"""
        path = tmp_path / "p.csv"
        path.write_text("0.0,1.0\n0.5,oops\n1.0,1.0\n")
        with pytest.raises(InputFormatError) as excinfo:
            load_density(path)
        assert excinfo.value.field == "line 2"

    def test_missing_file(self, tmp_path):
        """Nonexistent paths are input errors"""
        with pytest.raises(InputFormatError):
            load_density(tmp_path / "nowhere.csv")


class TestLoadDiscrete:
    def test_weights_normalised(self, tmp_path):
        """The last column is the weight"""
        path = tmp_path / "nu.csv"
        path.write_text("x,y,w\n1.0,0.0,1\n-1.0,0.0,3\n")
        nu = load_discrete(path)
        assert nu.d == 2
        np.testing.assert_allclose(nu.weights, [0.25, 0.75])

    def test_nonpositive_weight(self, tmp_path):
        """Weights must be positive"""
        path = tmp_path / "nu.csv"
        path.write_text("1.0,0.0\n2.0,1.0\n")
        with pytest.raises(InputFormatError) as excinfo:
            load_discrete(path)
        assert excinfo.value.field == "weight"

    def test_ragged_rows(self, tmp_path):
        """Rows must share a column count"""
        path = tmp_path / "nu.csv"
        path.write_text("1.0,1.0\n2.0,1.0,1.0\n")
        with pytest.raises(InputFormatError):
            load_discrete(path)
