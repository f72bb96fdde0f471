import pytest

from tpad.lfsr import LfsrSpec
from tpad.netlist import parse_netlist

FULL_ADDER = """\
.model adder
.inputs a b cin
.outputs s cout
x1 = XOR(a, b)
s = XOR(x1, cin)
g1 = AND(a, b)
g2 = AND(x1, cin)
cout = OR(g1, g2)
"""

# two-function ALU: op=0 adds (2-bit sum, no carry out), op=1 bitwise AND
ALU2 = """\
.model alu2
.inputs a0 a1 b0 b1 op
.outputs r0 r1
s0 = XOR(a0, b0)
c0 = AND(a0, b0)
x1 = XOR(a1, b1)
s1 = XOR(x1, c0)
n0 = AND(a0, b0)
n1 = AND(a1, b1)
no = NOT(op)
m00 = AND(no, s0)
m01 = AND(op, n0)
r0 = OR(m00, m01)
m10 = AND(no, s1)
m11 = AND(op, n1)
r1 = OR(m10, m11)
"""


@pytest.fixture(scope="session")
def full_adder():
    return parse_netlist(FULL_ADDER)


@pytest.fixture(scope="session")
def alu2():
    return parse_netlist(ALU2)


def lfsr16(r: int) -> LfsrSpec:
    """Degree-16 primitive polynomial with an r-bit tap subset."""
    return LfsrSpec(16, 0x1002D, 0xACE1, tuple(range(0, 2 * r, 2))[:r])
