import pytest

from shorlab.circuit import (
    Barrier,
    Circuit,
    ControlledAddConst,
    HadamardAll,
    MeasureRegister,
    QftOnRegister,
    RegisterLayout,
    add_const_permutation,
    build_oracle,
    build_shor_circuit,
)
from shorlab.conventions import ConventionConfig


def test_layout():
    lay = RegisterLayout(5)
    assert (lay.n_qubits, lay.n_clbits) == (15, 10)
    assert list(lay.qubits("a")) == [0, 1, 2, 3, 4]
    assert list(lay.qubits("p")) == [10, 11, 12, 13, 14]


def test_add_const_permutation():
    assert add_const_permutation(0, 5) == list(range(32))
    assert add_const_permutation(1, 5)[31] == 0
    p3, p29 = add_const_permutation(3, 5), add_const_permutation(29, 5)
    assert [p29[p3[x]] for x in range(32)] == list(range(32))
    with pytest.raises(ValueError):
        add_const_permutation(32, 5)


def _consts(gates, lay, reg):
    return [g.c for g in gates if g.control in lay.qubits(reg)]


def test_oracle_constants():
    lay = RegisterLayout(5)
    gates = build_oracle(lay, 1, 23)
    assert _consts(gates, lay, "a") == [1, 2, 4, 8, 16]
    assert _consts(gates, lay, "b") == [23, 14, 28, 24, 16]
    assert len(gates) == 10
    assert _consts(build_oracle(lay, 0, 23), lay, "a") == []
    # 16 * 2^i vanishes for i >= 1
    assert _consts(build_oracle(lay, 16, 1), lay, "a") == [16]


def test_shor_circuit_structure():
    conv = ConventionConfig()
    c = build_shor_circuit(5, 1, 23, conv)
    assert c.layout.n_qubits == 15 and c.layout.n_clbits == 10
    assert c.gates[:2] == (HadamardAll("a"), HadamardAll("b"))
    assert isinstance(c.gates[12], Barrier)
    assert c.gates[13:] == (
        QftOnRegister("a", False, conv.qft_sign_a),
        QftOnRegister("b", False, conv.qft_sign_b),
        MeasureRegister("a", 0),
        MeasureRegister("b", 5),
    )
    assert len(c.oracle_gates()) == 10

    tiny = build_shor_circuit(1, 1, 1, conv)
    assert tiny.layout.n_qubits == 3 and tiny.layout.n_clbits == 2
    assert len(tiny.oracle_gates()) == 2


def test_circuit_validation():
    lay = RegisterLayout(2)
    with pytest.raises(ValueError):
        Circuit(lay, (ControlledAddConst(9, "p", 1),))
    with pytest.raises(ValueError):
        Circuit(lay, (ControlledAddConst(0, "p", 0),))
    with pytest.raises(ValueError):
        Circuit(lay, (MeasureRegister("a", 0), HadamardAll("a")))
    with pytest.raises(ValueError):
        build_shor_circuit(9, 1, 1)


def test_dump():
    text = build_shor_circuit(5, 1, 23, ConventionConfig(qft_sign_b=1)).dump()
    lines = text.splitlines()
    assert lines[0] == "H a"
    assert "CADD c=14 ctrl=b[1]" in lines
    assert "QFT a noswap" in lines and "BARRIER" in lines
    assert lines[-2:] == ["M a→c[0..5)", "M b→c[5..10)"]


def test_no_gate_sees_secret():
    # Only q_index reaches the circuit; two secrets with equal q_index build identical circuits.
    assert build_shor_circuit(5, 1, 23) == build_shor_circuit(5, 1, 23)
    assert "k" not in build_shor_circuit.__code__.co_varnames
