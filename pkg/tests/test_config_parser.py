import logging

import pytest

from purimeter import ConfigParser, GaussianState, DomainError, RecordFormatError

ENSEMBLE_CONFIG = """
# small thermal sweep
acquisitions = 20
purity_range = 0.3:0.9      # inclusive
invert_loss = false
f_statistic = min
alpha = 1e-3
states = thermal(nbar=0.5); coherent(q=1, p=0)
bins_mode = grid48
"""


class TestConfigParser:

    @pytest.fixture(autouse=True)
    def setupLogger(self):
        self.logger = logging.getLogger("TestConfigParser")  # pylint: disable=attribute-defined-outside-init

    @pytest.mark.parametrize("test_input,expected_purity",
                             [
                                 ("vacuum", 1.0),
                                 ("vacuum()", 1.0),
                                 ("thermal(nbar=0.5)", 0.5),
                                 ("THERMAL(Purity=0.4)", 0.4),
                                 ("thermal( nbar = 1 )", 1.0 / 3.0),
                                 ("coherent(q=2, p=-1.5)", 1.0),
                                 ("coherent", 1.0),
                                 ("gaussian(sqq=1, spp=1)", 0.5),
                             ])
    def test_state_specs(self, test_input, expected_purity):
        state = ConfigParser.parseStateSpec(test_input)
        assert isinstance(state, GaussianState)
        assert state.purity == pytest.approx(expected_purity)

    def test_coherent_means(self):
        state = ConfigParser.parseStateSpec("coherent(q=2, p=-1.5)")
        assert state.mean_q == 2.0
        assert state.mean_p == -1.5

    def test_gaussian_spec(self):
        state = ConfigParser.parseStateSpec("gaussian(sqq=0.8, spp=0.5, spq=0.1, q=1e-1)")
        assert state.cov.sigma_qq == 0.8
        assert state.cov.sigma_pp == 0.5
        assert state.cov.sigma_pq == 0.1
        assert state.mean_q == pytest.approx(0.1)
        assert state.mean_p == 0.0

    def test_thermal_temperature_spec(self):
        state = ConfigParser.parseStateSpec("thermal(t=0.7)")
        assert state.purity < 1.0

    @pytest.mark.parametrize("test_input",
                             [
                                 "thermal(nbar=0.5, t=1)",
                                 "thermal",
                                 "gaussian(sqq=1)",
                                 "coherent(q=1, r=2)",
                                 "gaussian(sqq=0.2, spp=0.2)",
                                 "thermal(nbar=-1)",
                             ])
    def test_invalid_state_parameters(self, test_input):
        with pytest.raises(DomainError):
            ConfigParser.parseStateSpec(test_input)

    @pytest.mark.parametrize("test_input",
                             [
                                 "squeezed(r=1)",
                                 "thermal(nbar=)",
                                 "thermal(nbar=0.5",
                                 "coherent(q=1 p=2)",
                                 "",
                             ])
    def test_state_syntax_errors(self, test_input):
        with pytest.raises(RecordFormatError):
            ConfigParser.parseStateSpec(test_input)

    def test_state_list(self):
        states = ConfigParser.parseStateList("vacuum; thermal(nbar=1); coherent(q=3, p=0)")
        assert len(states) == 3
        assert states[1].meanPhotonNumber == pytest.approx(1.0)
        assert states[2].mean_q == 3.0

    def test_parse_config(self):
        options = ConfigParser.parseConfig(ENSEMBLE_CONFIG)

        assert options["acquisitions"] == 20
        assert options["purity_range"] == (0.3, 0.9)
        assert options["invert_loss"] is False
        assert options["f_statistic"] == "min"
        assert options["alpha"] == pytest.approx(1e-3)
        assert options["bins_mode"] == "grid48"
        assert len(options["states"]) == 2
        assert options["states"][0].purity == pytest.approx(0.5)

    @pytest.mark.parametrize("text,expected",
                             [
                                 ("seed = 18446744073709551615", 18446744073709551615),
                                 ("seed = 9007199254740993", 9007199254740993),
                                 ("seed = -3", -3),
                                 ("seed = 2.0", 2.0),
                                 ("seed = 1e3", 1000.0),
                             ])
    def test_integers_are_exact(self, text, expected):
        value = ConfigParser.parseConfig(text)["seed"]
        assert value == expected
        assert type(value) is type(expected)

    def test_parse_config_booleans(self):
        options = ConfigParser.parseConfig("a = TRUE\nb = False\n")
        assert options == {"a": True, "b": False}

    def test_blank_and_comment_lines(self):
        assert ConfigParser.parseConfig("\n# only a comment\n   \n") == {}

    def test_duplicate_key(self):
        with pytest.raises(RecordFormatError) as excinfo:
            ConfigParser.parseConfig("seed = 1\n\nseed = 2\n")
        assert excinfo.value.lineNumber == 3
        assert "duplicate" in excinfo.value.msg

    @pytest.mark.parametrize("text,expected_line",
                             [
                                 ("acquisitions 20\n", 1),
                                 ("seed = 1\nbins = \n", 2),
                                 ("seed = 1\n# comment\n= 5\n", 3),
                             ])
    def test_syntax_error_line_number(self, text, expected_line):
        with pytest.raises(RecordFormatError) as excinfo:
            ConfigParser.parseConfig(text)
        assert excinfo.value.lineNumber == expected_line

    def test_bad_state_in_config(self):
        with pytest.raises(RecordFormatError) as excinfo:
            ConfigParser.parseConfig("seed = 1\nstates = thermal(nbar=1, t=2)\n")
        assert excinfo.value.lineNumber == 2

    def test_read_config_file(self, tmp_path):
        path = tmp_path / "ensemble.cfg"
        path.write_text(ENSEMBLE_CONFIG, encoding="utf-8")
        options = ConfigParser.readConfigFile(str(path))
        assert options["acquisitions"] == 20

    def test_read_missing_config_file(self, tmp_path):
        with pytest.raises(OSError):
            ConfigParser.readConfigFile(str(tmp_path / "missing.cfg"))
