#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

"""
This file defines the `ConfigParser` class for state specifications and key-value configuration files
"""

import logging

import pyparsing as pp

from .gaussian_state import GaussianState, thermal_from_temperature
from .utils import RecordFormatError, DomainError, PurimeterError

_STATE_PARAMETERS = {
    "vacuum": (set(), set()),
    "thermal": (set(), {"nbar", "t", "purity"}),
    "coherent": (set(), {"q", "p"}),
    "gaussian": ({"sqq", "spp"}, {"spq", "q", "p"}),
}


class ConfigParser(object):
    """ ConfigParser class

        Parses state specifications such as `thermal(nbar=0.5)` and ensemble configuration files made of
        `key = value` lines
    """
    _state_parser = None
    _state_list_parser = None
    _line_parser = None

    @classmethod
    def _numberExpr(cls):
        number = pp.Regex(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?").setName("number_literal")
        number.setParseAction(lambda toks: float(toks[0]))
        return number

    @classmethod
    def _stateExpr(cls):
        number = cls._numberExpr()
        lbracket = pp.Literal("(").suppress().setName("lPar")
        rbracket = pp.Literal(")").suppress().setName("rPar")
        equals = pp.Literal("=").suppress()

        state_keyword = pp.oneOf(list(_STATE_PARAMETERS), caseless=True, asKeyword=True)
        state_keyword.setParseAction(lambda toks: toks[0].lower())

        param_name = pp.Word(pp.alphas, pp.alphanums + "_")
        param_name.setParseAction(lambda toks: toks[0].lower())
        param = pp.Group(param_name + equals + number)
        params = pp.Group(pp.Optional(lbracket + pp.Optional(pp.delimitedList(param)) + rbracket))
        return pp.Group(state_keyword + params).setName("state_spec")

    @classmethod
    def getStateSpecParser(cls):
        """
        Define a pyparsing based parser for state specifications

        Allowable constructs are:
         * `vacuum`
         * `thermal(nbar=n)`, `thermal(t=T)` or `thermal(purity=p)`
         * `coherent(q=x, p=y)`
         * `gaussian(sqq=a, spp=b, spq=c, q=x, p=y)` where `sqq` and `spp` are required

        Keywords are case insensitive and omitted parameters default to 0.

        :return: parser
        """
        if cls._state_parser is None:
            cls._state_parser = pp.StringStart() + cls._stateExpr() + pp.StringEnd()
        return cls._state_parser

    @classmethod
    def getStateListParser(cls):
        """ Parser for one or more state specifications separated by `;`"""
        if cls._state_list_parser is None:
            state_list = pp.delimitedList(cls._stateExpr(), delim=";")
            cls._state_list_parser = pp.StringStart() + state_list + pp.StringEnd()
        return cls._state_list_parser

    @classmethod
    def getConfigLineParser(cls):
        """
        Parser for a single configuration line of the form `key = value`

        Values may be numbers, booleans (`true` / `false`), ranges `lo:hi`, state lists or bare words.
        Text after `#` is a comment.

        :return: parser
        """
        if cls._line_parser is None:
            number = cls._numberExpr()
            integer = pp.Regex(r"[+-]?\d+").setName("integer_literal")
            integer.setParseAction(lambda toks: int(toks[0]))
            key = pp.Word(pp.alphas, pp.alphanums + "_").setName("key")
            equals = pp.Literal("=").suppress()

            boolean = pp.oneOf(["true", "false"], caseless=True, asKeyword=True)
            boolean.setParseAction(lambda toks: toks[0].lower() == "true")

            value_range = number + pp.Literal(":").suppress() + number
            value_range.setParseAction(lambda toks: ("range", (toks[0], toks[1])))

            states = pp.delimitedList(cls._stateExpr(), delim=";")
            states.setParseAction(lambda toks: ("states", [tok for tok in toks]))

            word = pp.Word(pp.alphanums + "_-./")

            at_end = pp.FollowedBy(pp.StringEnd())
            value = pp.MatchFirst([value_range, integer + at_end, number + at_end, boolean, states, word])
            line = pp.StringStart() + key + equals + value + pp.StringEnd()
            cls._line_parser = line
        return cls._line_parser

    @classmethod
    def _buildState(cls, ast):
        """ Build `GaussianState` from the parse result of one state spec"""
        name = ast[0]
        values = {param[0]: param[1] for param in ast[1]}
        required, optional = _STATE_PARAMETERS[name]

        missing = required - set(values)
        unknown = set(values) - required - optional
        if missing:
            raise DomainError(f"state `{name}` requires parameters {sorted(missing)}")
        if unknown:
            raise DomainError(f"state `{name}` does not accept parameters {sorted(unknown)}")

        if name == "vacuum":
            return GaussianState.vacuum()
        elif name == "thermal":
            if len(values) != 1:
                raise DomainError("thermal state needs exactly one of `nbar`, `t` or `purity`")
            if "nbar" in values:
                return GaussianState.thermal(values["nbar"])
            elif "t" in values:
                return thermal_from_temperature(values["t"])
            return GaussianState.thermalFromPurity(values["purity"])
        elif name == "coherent":
            return GaussianState.coherent(values.get("q", 0.0), values.get("p", 0.0))
        return GaussianState.general(values["sqq"], values["spp"], values.get("spq", 0.0),
                                     values.get("q", 0.0), values.get("p", 0.0))

    @classmethod
    def parseStateSpec(cls, text, lineNumber=None):
        """ Parse a state specification

        :param text: state specification, e.g. `coherent(q=2, p=0)`
        :param lineNumber: optional line number reported in errors
        :returns: `GaussianState`
        :raises: `RecordFormatError` for syntax errors, `DomainError` for invalid or unphysical parameters
        """
        try:
            ast = cls.getStateSpecParser().parseString(text.strip())
        except pp.ParseException as e:
            raise RecordFormatError(f"cannot parse state spec `{text}`: {e}", lineNumber=lineNumber,
                                    baseException=e) from e
        return cls._buildState(ast[0])

    @classmethod
    def parseStateList(cls, text, lineNumber=None):
        """ Parse `;` separated state specifications

        :returns: list of `GaussianState`
        """
        try:
            ast = cls.getStateListParser().parseString(text.strip())
        except pp.ParseException as e:
            raise RecordFormatError(f"cannot parse state list `{text}`: {e}", lineNumber=lineNumber,
                                    baseException=e) from e
        return [cls._buildState(spec) for spec in ast]

    @classmethod
    def parseConfig(cls, text):
        """ Parse configuration text

        Returns a dictionary from key to value, where integers are exact ints, other numbers are floats, booleans
        are bools, ranges are ``(lo, hi)`` tuples, state lists are lists of `GaussianState` and anything else is
        a string.
        Blank lines and comment lines are skipped; a key may appear only once.

        :param text: configuration text
        :returns: dict
        :raises: `RecordFormatError` with the line number of the first offending line
        """
        logger = logging.getLogger(__name__)
        parser = cls.getConfigLineParser()
        result = {}
        for line_number, raw_line in enumerate(text.splitlines(), start=1):
            line = raw_line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                key, value = parser.parseString(line)
            except pp.ParseException as e:
                raise RecordFormatError(f"cannot parse `{raw_line.strip()}`, expected `key = value`",
                                        lineNumber=line_number, baseException=e) from e
            if key in result:
                raise RecordFormatError(f"duplicate key `{key}`", lineNumber=line_number)

            if isinstance(value, tuple) and value[0] == "range":
                value = value[1]
            elif isinstance(value, tuple) and value[0] == "states":
                try:
                    value = [cls._buildState(spec) for spec in value[1]]
                except PurimeterError as e:
                    raise RecordFormatError(e.msg, lineNumber=line_number, baseException=e) from e
            logger.debug("config line %d: %s = %s", line_number, key, value)
            result[key] = value
        return result

    @classmethod
    def readConfigFile(cls, path):
        """ Read and parse a configuration file

        :param path: file path
        :returns: dict as for `parseConfig`
        :raises: `OSError` if the file cannot be read
        """
        with open(path, "r", encoding="utf-8") as fh:
            return cls.parseConfig(fh.read())
