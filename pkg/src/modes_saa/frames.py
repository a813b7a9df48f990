"""Mode S DF4 (surveillance altitude reply) frame codec.

Layout of the 56 payload bits, MSB first::

    DF(5)=00100  FS(3)  DR(5)  UM(6)  AC(13)  AP(24)

AP is address/parity: the CRC-24 of the first 32 bits XORed with the
24-bit address of the replying transponder.  Only the 25-ft (Q=1) altitude
code is supported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import AltitudeEncodingError, UnsupportedEncodingError

# x^24 + x^23 + ... + x^12 + x^10 + x^3 + 1, leading term implicit
GENERATOR = 0xFFF409
GENERATOR_FULL = (1 << 24) | GENERATOR

FRAME_BITS = 56
DATA_BITS = 32
DF4 = 0b00100

ALT_MIN_FT = -1000
ALT_MAX_FT = 50175
ALT_STEP_FT = 25

FT_PER_M = 1.0 / 0.3048

_M_BIT = 0x0040
_Q_BIT = 0x0010


def _as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8).ravel()
    if arr.size and arr.max() > 1:
        raise ValueError("bit vector entries must be 0 or 1")
    return arr


def bits_to_int(bits) -> int:
    value = 0
    for b in _as_bits(bits):
        value = (value << 1) | int(b)
    return value


def int_to_bits(value: int, width: int) -> np.ndarray:
    if value < 0 or value >> width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return np.array([(value >> (width - 1 - k)) & 1 for k in range(width)], dtype=np.uint8)


def crc24(bits) -> int:
    """Mode S parity of a bit vector: remainder of ``bits(x) * x^24`` mod G."""
    arr = _as_bits(bits)
    if arr.size < 1:
        raise ValueError("crc24 needs at least one bit")
    crc = 0
    for b in arr:
        top = ((crc >> 23) & 1) ^ int(b)
        crc = (crc << 1) & 0xFFFFFF
        if top:
            crc ^= GENERATOR
    return crc


def encode_altitude(altitude_ft: int) -> int:
    """13-bit AC field for ``altitude_ft`` using the 25-ft increment code."""
    if altitude_ft != int(altitude_ft):
        raise AltitudeEncodingError(f"altitude {altitude_ft} ft is not an integer")
    altitude_ft = int(altitude_ft)
    if not ALT_MIN_FT <= altitude_ft <= ALT_MAX_FT:
        raise AltitudeEncodingError(
            f"altitude {altitude_ft} ft outside [{ALT_MIN_FT}, {ALT_MAX_FT}]"
        )
    if altitude_ft % ALT_STEP_FT:
        raise AltitudeEncodingError(f"altitude {altitude_ft} ft is not a multiple of 25 ft")
    n = (altitude_ft - ALT_MIN_FT) // ALT_STEP_FT
    return ((n & 0x7E0) << 2) | ((n & 0x010) << 1) | (n & 0x00F) | _Q_BIT


def altitude_count(ac: int) -> int:
    """The 11-bit increment count N of a Q=1 AC field (M and Q bits removed)."""
    return ((ac & 0x1F80) >> 2) | ((ac & 0x0020) >> 1) | (ac & 0x000F)


def decode_altitude(ac: int) -> int:
    if ac & _M_BIT:
        raise UnsupportedEncodingError("metric altitude (M=1) is not supported")
    if not ac & _Q_BIT:
        raise UnsupportedEncodingError("Gillham altitude (Q=0) is not supported")
    return ALT_STEP_FT * altitude_count(ac) + ALT_MIN_FT


def meters_to_feet(h_m: float) -> float:
    return h_m * FT_PER_M


def feet_to_meters(h_ft: float) -> float:
    return h_ft / FT_PER_M


@dataclass(frozen=True, eq=False)
class Df4Frame:
    """56 payload bits of a DF4 reply."""

    bits: np.ndarray

    def __post_init__(self):
        arr = _as_bits(self.bits).copy()
        if arr.size != FRAME_BITS:
            raise ValueError(f"DF4 frame must have {FRAME_BITS} bits, got {arr.size}")
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    def __eq__(self, other):
        return isinstance(other, Df4Frame) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())

    def _field(self, start: int, width: int) -> int:
        return bits_to_int(self.bits[start : start + width])

    @property
    def df_format(self) -> int:
        return self._field(0, 5)

    @property
    def flight_status(self) -> int:
        return self._field(5, 3)

    @property
    def downlink_request(self) -> int:
        return self._field(8, 5)

    @property
    def utility_msg(self) -> int:
        return self._field(13, 6)

    @property
    def altitude_code(self) -> int:
        return self._field(19, 13)

    @property
    def address_parity(self) -> int:
        return self._field(32, 24)

    def to_hex(self) -> str:
        return f"{bits_to_int(self.bits):014X}"

    @classmethod
    def from_hex(cls, text: str) -> "Df4Frame":
        text = text.strip()
        if len(text) != 14:
            raise ValueError("DF4 frame hex must be 14 characters")
        return cls(int_to_bits(int(text, 16), FRAME_BITS))


def build_frame(
    altitude_ft: int,
    address: int,
    flight_status: int = 0,
    downlink_request: int = 0,
    utility_msg: int = 0,
) -> Df4Frame:
    header = np.concatenate(
        [
            int_to_bits(DF4, 5),
            int_to_bits(flight_status, 3),
            int_to_bits(downlink_request, 5),
            int_to_bits(utility_msg, 6),
            int_to_bits(encode_altitude(altitude_ft), 13),
        ]
    )
    if not 0 <= address <= 0xFFFFFF:
        raise ValueError("address must be a 24-bit value")
    ap = crc24(header) ^ address
    return Df4Frame(np.concatenate([header, int_to_bits(ap, 24)]))


def check_crc(frame, expected_address: int) -> bool:
    """True iff the AP field matches the parity of the data bits for this address."""
    bits = frame.bits if isinstance(frame, Df4Frame) else _as_bits(frame)
    if bits.size != FRAME_BITS:
        return False
    return crc24(bits[:DATA_BITS]) ^ bits_to_int(bits[DATA_BITS:]) == expected_address


def ppm_expand(b) -> np.ndarray:
    """112 PPM chips ``[b0, !b0, b1, !b1, ...]``."""
    arr = _as_bits(b.bits if isinstance(b, Df4Frame) else b)
    if arr.size != FRAME_BITS:
        raise ValueError(f"payload must have {FRAME_BITS} bits")
    chips = np.empty(2 * FRAME_BITS, dtype=np.uint8)
    chips[0::2] = arr
    chips[1::2] = 1 - arr
    return chips


def nonzero_chip_indices(chips) -> np.ndarray:
    return np.flatnonzero(np.asarray(chips))
