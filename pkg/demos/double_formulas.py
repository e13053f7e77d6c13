"""Double commutator formulas on a few small rings, printed as a table."""

from relcomm.report import summary_table
from relcomm.verify import LinearInstance, verify_double_formulas

INSTANCES = [
    ("zmod:8", ["(2)", "(4)"]),
    ("zmod:36", ["(2)", "(9)"]),
    ("zmod:6", ["(2)", "(3)"]),
]

if __name__ == "__main__":
    records = []
    for ring, ideals in INSTANCES:
        records += verify_double_formulas(LinearInstance(ring, 3, ideals))
    print(summary_table(records))
