"""Tooth notation conversion: FDI, UNS, Palmer, and Haderup.

Internally every tooth is a (quadrant, position) pair in FDI terms.
Quadrants 1-4 are the permanent dentition (positions 1-8), quadrants 5-8
the deciduous dentition (positions 1-5).  Quadrant order is upper right,
upper left, lower left, lower right.

UNS numbers the permanent teeth 1-32 starting at the upper right third
molar, crossing to the upper left, then descending to the lower left and
finishing at the lower right third molar; deciduous teeth are lettered
A-T along the same walk.  Palmer keeps the FDI position within a quadrant
prefixed by UR/UL/LL/LR (letters A-E for deciduous positions).  Haderup
marks the upper jaw with '+' and the lower with '-', placing the sign on
the midline side of the digit: right-side teeth carry it after the digit
("1+"), left-side teeth before it ("+1").  Deciduous teeth have no
Haderup rendering here.
"""

from __future__ import annotations

from aida.errors import ValidationError

SYSTEMS = ("fdi", "uns", "palmer", "haderup")

_PERMANENT_QUADRANTS = "1234"
_DECIDUOUS_QUADRANTS = "5678"
_PALMER_QUADRANT = {"1": "UR", "2": "UL", "3": "LL", "4": "LR", "5": "UR", "6": "UL", "7": "LL", "8": "LR"}
_PALMER_LETTERS = "ABCDE"


def _fdi_components(code: str) -> tuple[int, int]:
    if len(code) != 2 or not code.isdigit():
        raise ValidationError(f"invalid FDI code: {code!r}", code="notation-invalid")
    quadrant, position = int(code[0]), int(code[1])
    if quadrant in (1, 2, 3, 4):
        if not 1 <= position <= 8:
            raise ValidationError(f"invalid FDI position in {code!r}", code="notation-invalid")
    elif quadrant in (5, 6, 7, 8):
        if not 1 <= position <= 5:
            raise ValidationError(f"invalid FDI position in {code!r}", code="notation-invalid")
    else:
        raise ValidationError(f"invalid FDI quadrant in {code!r}", code="notation-invalid")
    return quadrant, position


def is_valid_fdi(code: str) -> bool:
    try:
        _fdi_components(code)
        return True
    except ValidationError:
        return False


def is_permanent(fdi: str) -> bool:
    quadrant, _ = _fdi_components(fdi)
    return quadrant <= 4


def _uns_walk(deciduous: bool) -> list[str]:
    """FDI codes in UNS order: upper right distal-first, upper left,
    lower left distal-first ... down to lower right."""
    span = 5 if deciduous else 8
    offset = 4 if deciduous else 0
    upper_right = [f"{1 + offset}{p}" for p in range(span, 0, -1)]
    upper_left = [f"{2 + offset}{p}" for p in range(1, span + 1)]
    lower_left = [f"{3 + offset}{p}" for p in range(span, 0, -1)]
    lower_right = [f"{4 + offset}{p}" for p in range(1, span + 1)]
    return upper_right + upper_left + lower_left + lower_right


_UNS_PERMANENT = _uns_walk(deciduous=False)
_UNS_DECIDUOUS = _uns_walk(deciduous=True)

_FDI_TO_UNS: dict[str, str] = {}
_UNS_TO_FDI: dict[str, str] = {}
for _i, _fdi in enumerate(_UNS_PERMANENT, start=1):
    _FDI_TO_UNS[_fdi] = str(_i)
    _UNS_TO_FDI[str(_i)] = _fdi
for _i, _fdi in enumerate(_UNS_DECIDUOUS):
    letter = chr(ord("A") + _i)
    _FDI_TO_UNS[_fdi] = letter
    _UNS_TO_FDI[letter] = _fdi

PERMANENT_FDI = sorted(_UNS_PERMANENT)
DECIDUOUS_FDI = sorted(_UNS_DECIDUOUS)


def _fdi_to_palmer(fdi: str) -> str:
    quadrant, position = _fdi_components(fdi)
    prefix = _PALMER_QUADRANT[str(quadrant)]
    if quadrant <= 4:
        return f"{prefix}{position}"
    return f"{prefix}{_PALMER_LETTERS[position - 1]}"


def _palmer_to_fdi(code: str) -> str:
    prefix, tail = code[:2].upper(), code[2:]
    quadrant_map = {"UR": "1", "UL": "2", "LL": "3", "LR": "4"}
    if prefix not in quadrant_map or not tail:
        raise ValidationError(f"invalid Palmer code: {code!r}", code="notation-invalid")
    if tail in _PALMER_LETTERS:
        deciduous_quadrant = str(int(quadrant_map[prefix]) + 4)
        return f"{deciduous_quadrant}{_PALMER_LETTERS.index(tail) + 1}"
    if tail.isdigit() and 1 <= int(tail) <= 8 and len(tail) == 1:
        return f"{quadrant_map[prefix]}{tail}"
    raise ValidationError(f"invalid Palmer code: {code!r}", code="notation-invalid")


def _fdi_to_haderup(fdi: str) -> str:
    quadrant, position = _fdi_components(fdi)
    if quadrant > 4:
        raise ValidationError(
            f"no Haderup rendering for deciduous tooth {fdi!r}", code="notation-unsupported"
        )
    sign = "+" if quadrant in (1, 2) else "-"
    right = quadrant in (1, 4)
    return f"{position}{sign}" if right else f"{sign}{position}"


def _haderup_to_fdi(code: str) -> str:
    if len(code) != 2:
        raise ValidationError(f"invalid Haderup code: {code!r}", code="notation-invalid")
    if code[1] in "+-" and code[0].isdigit():
        sign, digit, right = code[1], int(code[0]), True
    elif code[0] in "+-" and code[1].isdigit():
        sign, digit, right = code[0], int(code[1]), False
    else:
        raise ValidationError(f"invalid Haderup code: {code!r}", code="notation-invalid")
    if not 1 <= digit <= 8:
        raise ValidationError(f"invalid Haderup position in {code!r}", code="notation-invalid")
    upper = sign == "+"
    if upper:
        quadrant = "1" if right else "2"
    else:
        quadrant = "4" if right else "3"
    return f"{quadrant}{digit}"


def to_fdi(code: str, system: str) -> str:
    system = system.lower()
    if system == "fdi":
        _fdi_components(code)
        return code
    if system == "uns":
        fdi = _UNS_TO_FDI.get(code.upper() if not code.isdigit() else code)
        if fdi is None:
            raise ValidationError(f"invalid UNS code: {code!r}", code="notation-invalid")
        return fdi
    if system == "palmer":
        return _palmer_to_fdi(code)
    if system == "haderup":
        return _haderup_to_fdi(code)
    raise ValidationError(f"unknown notation system: {system!r}", code="notation-invalid")


def from_fdi(fdi: str, system: str) -> str:
    system = system.lower()
    _fdi_components(fdi)
    if system == "fdi":
        return fdi
    if system == "uns":
        return _FDI_TO_UNS[fdi]
    if system == "palmer":
        return _fdi_to_palmer(fdi)
    if system == "haderup":
        return _fdi_to_haderup(fdi)
    raise ValidationError(f"unknown notation system: {system!r}", code="notation-invalid")


def convert_notation(code: str, source: str, target: str) -> str:
    """Convert a tooth code between notation systems via the FDI pivot."""
    return from_fdi(to_fdi(code, source), target)


def all_codes(fdi: str) -> dict[str, str]:
    """Every system's rendering of one tooth; Haderup omitted for deciduous."""
    out = {"fdi": fdi, "uns": from_fdi(fdi, "uns"), "palmer": from_fdi(fdi, "palmer")}
    if is_permanent(fdi):
        out["haderup"] = from_fdi(fdi, "haderup")
    return out
