import json

import numpy as np
import pytest

from urigid.cli import main
from urigid.errors import SchemaError
from urigid.generators import named_example
from urigid.jsonio import (
    framework_digest,
    omega_from_list,
    omega_to_list,
    parse_framework,
    parse_stress,
    serialize_framework,
)

SQUARE_K4_JSON = """
{
  "dimension": 2,
  "points": [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
  "edges": [[1, 2], [2, 3], [3, 4], [4, 1], [1, 3], [2, 4]]
}
"""


class TestFrameworkSchema:
    def test_parse(self):
        fw = parse_framework(SQUARE_K4_JSON)
        assert fw.n == 4 and fw.r == 2
        assert fw.graph.is_complete

    def test_round_trip_bit_exact(self):
        fw = named_example("lateration-5-2")
        again = parse_framework(serialize_framework(fw))
        assert np.array_equal(again.config.points, fw.config.points)
        assert again.graph.edges == fw.graph.edges
        # digests agree iff the round trip is bit-exact
        assert framework_digest(again) == framework_digest(fw)

    def test_missing_dimension(self):
        with pytest.raises(SchemaError, match="dimension"):
            parse_framework('{"points": [[0.0]], "edges": []}')

    def test_loop_edge(self):
        with pytest.raises(SchemaError, match=r"edges\[0\].*loop"):
            parse_framework('{"dimension": 1, "points": [[0.0], [1.0]], "edges": [[1, 1]]}')

    def test_duplicate_edge(self):
        with pytest.raises(SchemaError, match=r"edges\[1\].*duplicate"):
            parse_framework('{"dimension": 1, "points": [[0.0], [1.0]], "edges": [[1, 2], [2, 1]]}')

    def test_label_out_of_range(self):
        with pytest.raises(SchemaError, match=r"edges\[0\].*outside"):
            parse_framework('{"dimension": 1, "points": [[0.0], [1.0]], "edges": [[1, 3]]}')

    def test_wrong_point_arity(self):
        with pytest.raises(SchemaError, match=r"points\[1\].*expected 2"):
            parse_framework('{"dimension": 2, "points": [[0.0, 0.0], [1.0]], "edges": [[1, 2]]}')

    def test_non_numeric_coordinate(self):
        with pytest.raises(SchemaError, match=r"points\[0\]\[1\]"):
            parse_framework('{"dimension": 2, "points": [[0.0, "x"], [1.0, 0.0]], "edges": [[1, 2]]}')

    def test_invalid_json(self):
        with pytest.raises(SchemaError, match="invalid JSON"):
            parse_framework("{nope")


class TestStressSchema:
    def test_round_trip(self):
        fw = named_example("square-k4")
        omega = np.array([1.0, -1.0, 1.0, 1.0, -1.0, 1.0])
        entries = omega_to_list(fw, omega)
        assert np.array_equal(omega_from_list(fw, entries), omega)

    def test_missing_edge_entry(self):
        fw = named_example("square-k4")
        entries = omega_to_list(fw, np.ones(6))[:-1]
        with pytest.raises(SchemaError, match="missing edges"):
            omega_from_list(fw, entries)

    def test_unknown_edge_entry(self):
        fw = named_example("square-c4")
        entries = omega_to_list(fw, np.ones(4)) + [{"edge": [1, 3], "value": 0.5}]
        with pytest.raises(SchemaError, match="unknown edges"):
            omega_from_list(fw, entries)

    def test_parse_stress_document(self):
        fw = named_example("square-k4")
        text = json.dumps({"omega": omega_to_list(fw, np.arange(6.0))})
        assert np.array_equal(parse_stress(text, fw), np.arange(6.0))


def _write_framework(tmp_path, name):
    path = tmp_path / f"{name}.json"
    path.write_text(serialize_framework(named_example(name)), encoding="utf-8")
    return str(path)


class TestCli:
    def test_gen_and_certify_rigid(self, tmp_path, capsys):
        fw_path = str(tmp_path / "fw.json")
        assert main(["gen", "named", "--name", "square-k4", "-o", fw_path]) == 0
        cert_path = str(tmp_path / "cert.json")
        assert main(["certify", fw_path, "-o", cert_path]) == 0
        doc = json.loads(open(cert_path).read())
        assert doc["verdict"] == "UniversallyRigid"
        assert main(["verify", fw_path, cert_path]) == 0
        assert "accepted" in capsys.readouterr().out

    def test_certify_flexible_exit_code(self, tmp_path):
        fw_path = _write_framework(tmp_path, "square-c4")
        cert_path = str(tmp_path / "cert.json")
        assert main(["certify", fw_path, "-o", cert_path]) == 2
        doc = json.loads(open(cert_path).read())
        assert doc["verdict"] == "AffineFlexExists"

    def test_certify_inconclusive_exit_code(self, tmp_path):
        path = tmp_path / "tree.json"
        path.write_text(
            json.dumps(
                {
                    "dimension": 2,
                    "points": [[0.1, 0.2], [0.9, 0.3], [0.4, 0.8], [0.2, 0.6]],
                    "edges": [[1, 2], [2, 3], [3, 4]],
                }
            ),
            encoding="utf-8",
        )
        assert main(["certify", str(path)]) == 3

    def test_certify_deterministic_bytes(self, tmp_path):
        fw_path = _write_framework(tmp_path, "lateration-5-2")
        out1, out2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        assert main(["certify", fw_path, "-o", out1]) == 0
        assert main(["certify", fw_path, "-o", out2]) == 0
        assert open(out1, "rb").read() == open(out2, "rb").read()

    def test_verify_rejects_tamper(self, tmp_path, capsys):
        fw_path = _write_framework(tmp_path, "square-k4")
        cert_path = str(tmp_path / "cert.json")
        assert main(["certify", fw_path, "-o", cert_path]) == 0
        doc = json.loads(open(cert_path).read())
        for entry in doc["witnesses"]["omega"]:
            entry["value"] = -entry["value"]
        open(cert_path, "w").write(json.dumps(doc))
        assert main(["verify", fw_path, cert_path]) == 2
        assert "REJECTED" in capsys.readouterr().out

    def test_flex_witness_and_none(self, tmp_path):
        c4 = _write_framework(tmp_path, "square-c4")
        k4 = _write_framework(tmp_path, "square-k4")
        out = str(tmp_path / "flex.json")
        assert main(["flex", c4, "-o", out]) == 0
        doc = json.loads(open(out).read())
        assert doc["witness"]["t"] == pytest.approx(np.sqrt(2) / 2)
        assert main(["flex", k4, "-o", out]) == 3
        assert json.loads(open(out).read())["witness"] is None

    def test_stress_report(self, tmp_path):
        fw_path = _write_framework(tmp_path, "square-k4")
        out = str(tmp_path / "stress.json")
        assert main(["stress", fw_path, "-o", out]) == 0
        doc = json.loads(open(out).read())
        assert doc["basis_dimension"] == 1
        assert doc["search"]["accepted"] is True
        assert doc["search"]["rank"] == 1

    def test_gale_output(self, tmp_path):
        fw_path = _write_framework(tmp_path, "lateration-5-2")
        out = str(tmp_path / "gale.json")
        assert main(["gale", fw_path, "-o", out]) == 0
        doc = json.loads(open(out).read())
        assert len(doc["gale"]) == 5 and len(doc["gale"][0]) == 2
        assert doc["canonical_gale"] is not None
        assert doc["general_position"] is True

    def test_refute_flexible_and_rigid(self, tmp_path):
        c4 = _write_framework(tmp_path, "square-c4")
        k4 = _write_framework(tmp_path, "square-k4")
        out = str(tmp_path / "refute.json")
        assert main(["refute", c4, "--dims", "2", "--restarts", "10", "-o", out]) == 0
        doc = json.loads(open(out).read())
        assert doc["counterexample"]["dimension"] == 2
        assert main(["refute", k4, "--dims", "2..3", "--restarts", "5", "-o", out]) == 3

    def test_user_stress_input(self, tmp_path):
        fw_path = _write_framework(tmp_path, "square-k4")
        fw = named_example("square-k4")
        stress_path = tmp_path / "stress.json"
        stress_path.write_text(
            json.dumps({"omega": omega_to_list(fw, np.array([1.0, -1.0, 1.0, 1.0, -1.0, 1.0]))}),
            encoding="utf-8",
        )
        assert main(["certify", fw_path, "--stress", str(stress_path)]) == 0

    def test_malformed_input_exit_one(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"dimension": 2, "points": [[0.0, 0.0]], "edges": [[1, 1]]}', encoding="utf-8")
        assert main(["certify", str(path)]) == 1
        assert "loop" in capsys.readouterr().err

    def test_missing_file_exit_one(self, tmp_path, capsys):
        assert main(["certify", str(tmp_path / "absent.json")]) == 1
        capsys.readouterr()

    def test_gen_lateration(self, tmp_path):
        out = str(tmp_path / "lat.json")
        assert main(["gen", "lateration", "--n", "6", "--r", "2", "--seed", "3", "-o", out]) == 0
        doc = json.loads(open(out).read())
        assert len(doc["points"]) == 6
        assert [1, 2] in doc["edges"]

    def test_no_partial_output_on_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{broken", encoding="utf-8")
        out = tmp_path / "cert.json"
        assert main(["certify", str(bad), "-o", str(out)]) == 1
        assert not out.exists()
