"""Smoke test for the orbicover Python extension."""

import json

import orbicover

RUNNING_PAIR = json.dumps({"min_poly": [-2, 0, 1], "form_diagonal": [["1"], ["1"], ["1"], ["1"], ["0", "-1"]]})


def main():
    order = orbicover.so_order(5, 7)
    assert str(order) == "7^4·(7^2-1)·(7^4-1)", str(order)
    assert order.value() == 7**4 * (7**2 - 1) * (7**4 - 1)
    assert order.divisible_by(5) and not order.divisible_by(11)

    assert orbicover.brute_force_so_count([1, 1, 1], 3) == 24
    assert orbicover.so_order(4, 3, square_class="nonsquare").value() == 720
    assert orbicover.point_count_so_order([1, 1, 1, 1, 1], 3) == 51840
    assert orbicover.zsigmondy_prime(7, 2) == 5
    assert orbicover.multiplicative_order(5, 7) == 4

    pair = orbicover.AdmissiblePair.from_json(RUNNING_PAIR)
    assert pair.m == 4
    assert [p for p, _, _ in pair.good_primes(20)] == [3, 5, 7, 7, 11, 13, 17, 17, 19]

    certs = pair.certify_prime(7, with_witness=True)
    assert len(certs) == 2
    for cert in certs:
        ok, checks = cert.verify()
        assert ok, [c for c in checks if not c[1]]
        assert json.loads(cert.to_json())["cover_prime"]["ell"] == "5"

    pair_cert = pair.certify_pair()
    assert pair_cert.kind == "isospectral_pair" and pair_cert.verify()[0]

    tower = pair.certify_tower(3, bound=500)
    ratios = [int(s["volume_ratio"]) for s in json.loads(tower.to_json())["stages"]]
    assert ratios == [5, 25, 125], ratios

    tampered = json.loads(certs[0].to_json())
    tampered["cover_prime"]["ell"] = "3"
    assert not orbicover.Certificate.from_json(json.dumps(tampered)).verify()[0]

    print("orbicover smoke test passed")


if __name__ == "__main__":
    main()
