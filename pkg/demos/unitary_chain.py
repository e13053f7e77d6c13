"""Steinberg relations and the unitary commutator chain over Z/8 with Lambda = {0}."""

from relcomm.report import summary_table
from relcomm.verify import RunConfig, verify_unitary

if __name__ == "__main__":
    records = verify_unitary("form:zmod:8;lambda=1;Lambda=min", 3, ["fideal:2;Gamma=min"] * 2, RunConfig(seed=0))
    print(summary_table(records))
    for r in records:
        if r.check_id.startswith("unitary.chain"):
            print(r.check_id, r.cardinalities)
