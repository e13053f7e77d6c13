"""Search small rings for triples where the symmetrised product is not associative."""

from relcomm.verify import search_nonassociativity

if __name__ == "__main__":
    for r in search_nonassociativity(["zmod:8", "tri:zmod:2,2"]):
        print(r.instance["ring"], r.check_id, r.cardinalities.get("witnesses", "-"))
        if r.witness:
            for t in r.witness["triples"][:2]:
                print("   ", t)
