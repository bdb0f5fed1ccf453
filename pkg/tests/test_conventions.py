from math import gcd

import pytest

from shorlab.circuit import build_shor_circuit
from shorlab.conventions import (
    PAPER_LITERAL,
    ConventionConfig,
    MalformedBitstring,
    convention_space,
    decode_pair,
    parse_bitstring,
    render_bitstring,
)
from shorlab.simulator import NoConsistentConvention, calibrate_conventions, passing_conventions, run_exact


def _decoded_ks(n, p, q, conv):
    N = 1 << n
    ks = set()
    for a_reg, b_reg in run_exact(build_shor_circuit(n, p, q, conv)).support():
        a, b = decode_pair(a_reg, b_reg, n, conv)
        if gcd(b, N) == 1:
            ks.add((-a * pow(b, -1, N)) % N)
    return ks


def test_render_and_parse_roundtrip():
    conv = ConventionConfig(register_halves_order="b-high", postparse_endian_flip=False)
    assert render_bitstring(1, 0, 5) == "0000000001"
    assert parse_bitstring("0000000001", 5, conv) == (1, 0)
    for a in range(8):
        for b in range(8):
            assert parse_bitstring(render_bitstring(a, b, 3), 3, conv) == (a, b)


def test_main_script_parse():
    # bits_to_int(bs) = int(bs[::-1], 2); a from key[n:], b from key[:n]
    key = "1100010110"
    a = int(key[5:][::-1], 2)
    b = int(key[:5][::-1], 2)
    assert parse_bitstring(key, 5, PAPER_LITERAL) == (a, b)


def test_visualisation_script_parse():
    # parsed_counts: a from key[:n], b from key[n:], each endian-flipped
    key = "1100010110"
    conv = ConventionConfig(register_halves_order="a-high")
    assert parse_bitstring(key, 5, conv) == (int(key[:5][::-1], 2), int(key[5:][::-1], 2))


@pytest.mark.parametrize("bad", ["000", "00000000012", "000000000x"])
def test_malformed(bad):
    with pytest.raises(MalformedBitstring):
        parse_bitstring(bad, 5, ConventionConfig())


def test_space_size():
    assert len(list(convention_space())) == 32
    assert len(list(convention_space(shared_sign_only=True))) == 16


def test_n2_calibration_exists_and_recovers():
    conv = calibrate_conventions(2)
    for k in range(4):
        assert _decoded_ks(2, 1, k, conv) == {k}


def test_calibration_stable_across_widths():
    assert calibrate_conventions(2) == calibrate_conventions(3) == calibrate_conventions(4)
    assert calibrate_conventions(3) == ConventionConfig()
    assert set(passing_conventions(3)) == set(passing_conventions(4))


def test_shared_sign_space_has_no_solution():
    # A single Fourier sign leaves the ridge v = k*u, which k = -a/b cannot read as k.
    with pytest.raises(NoConsistentConvention):
        calibrate_conventions(3, shared_sign_only=True)


def test_every_passing_convention_uses_opposite_signs():
    for conv in passing_conventions(3):
        assert conv.qft_sign_a == -conv.qft_sign_b


def test_n1_only_pins_halves_order():
    # -k == k mod 2 makes signs and bit order irrelevant; k=0 still needs b read from the a-register half.
    found = passing_conventions(1)
    assert len(found) == 16
    assert {c.register_halves_order for c in found} == {"a-high"}


def test_paper_compat_recovers_7(compat):
    assert compat.qft_final_swaps is False and compat.postparse_endian_flip is True
    assert _decoded_ks(5, 1, 23, compat) == {7}


def test_paper_literal_circuit_decodes_to_25():
    assert _decoded_ks(5, 1, 23, PAPER_LITERAL) == {25}
    visual = ConventionConfig(qft_sign_a=1, qft_sign_b=1, register_halves_order="a-high")
    assert _decoded_ks(5, 1, 23, visual) == {9}


def test_dict_roundtrip():
    c = ConventionConfig()
    assert ConventionConfig.from_dict(c.to_dict()) == c
    with pytest.raises(ValueError):
        ConventionConfig(qft_sign_a=0)
