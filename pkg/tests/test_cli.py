import json

import pytest
from click.testing import CliRunner

from ringmpc.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def write_config(tmp_path, name, body):
    path = tmp_path / name
    path.write_text(json.dumps(body))
    return str(path)


class TestRun:
    def test_sum_config(self, runner, tmp_path):
        cfg = write_config(tmp_path, "sum.json",
                           {"protocol": "secure_sum", "inputs": [3, 5, 7], "seed": 7})
        result = runner.invoke(main, ["run", cfg])
        assert result.exit_code == 0
        assert json.loads(result.output)["outcome"] == {"sum": "15"}

    def test_modular_product_config(self, runner, tmp_path):
        cfg = write_config(tmp_path, "prod.json", {
            "protocol": "secure_product", "inputs": [2, 3, 4],
            "ring": {"ring": "Zm", "m": 7}, "seed": 1,
        })
        result = runner.invoke(main, ["run", cfg])
        assert result.exit_code == 0
        assert json.loads(result.output)["outcome"] == {"product": "3"}

    def test_path_topology_exits_3(self, runner, tmp_path):
        cfg = write_config(tmp_path, "bad.json", {
            "protocol": "secure_sum", "inputs": [1, 2, 3],
            "topology": {"k": 3, "edges": [[0, 1, "secure"], [1, 2, "secure"]]},
        })
        result = runner.invoke(main, ["run", cfg])
        assert result.exit_code == 3

    def test_unknown_protocol_exits_2(self, runner, tmp_path):
        cfg = write_config(tmp_path, "bad.json", {"protocol": "nope", "inputs": []})
        assert runner.invoke(main, ["run", cfg]).exit_code == 2

    def test_invalid_json_exits_2(self, runner, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert runner.invoke(main, ["run", str(path)]).exit_code == 2

    def test_big_integers_survive_the_decimal_encoding(self, runner, tmp_path):
        big = 10**40 + 7
        cfg = write_config(tmp_path, "big.json", {
            "protocol": "secure_sum", "inputs": [str(big), "1", "2"],
            "ring": {"ring": "Z", "noise_bound": 1000000}, "seed": 3,
        })
        result = runner.invoke(main, ["run", cfg])
        assert result.exit_code == 0
        assert json.loads(result.output)["outcome"]["sum"] == str(big + 3)


class TestReplay:
    def make_transcript(self, runner, tmp_path, body=None):
        cfg = write_config(tmp_path, "sum.json", body or {
            "protocol": "secure_sum", "inputs": [3, 5, 7], "seed": 7,
        })
        out = str(tmp_path / "t.jsonl")
        result = runner.invoke(main, ["run", cfg, "--out", out])
        assert result.exit_code == 0
        return out

    def test_untouched_transcript_verifies(self, runner, tmp_path):
        out = self.make_transcript(runner, tmp_path)
        result = runner.invoke(main, ["replay", out])
        assert result.exit_code == 0 and "verified" in result.output

    def test_flipped_payload_pinpointed(self, runner, tmp_path):
        out = self.make_transcript(runner, tmp_path)
        lines = open(out).read().strip().split("\n")
        record = json.loads(lines[2])
        record["payload"] = str(int(record["payload"]) + 1)
        lines[2] = json.dumps(record, sort_keys=True, separators=(",", ":"))
        open(out, "w").write("\n".join(lines) + "\n")
        result = runner.invoke(main, ["replay", out])
        assert result.exit_code == 4
        assert f"seq {record['seq']}" in result.output

    def test_truncated_file_is_an_error_not_a_divergence(self, runner, tmp_path):
        out = self.make_transcript(runner, tmp_path)
        text = open(out).read()
        open(out, "w").write(text[: len(text) // 2].rsplit("\n", 1)[0][:-4])
        result = runner.invoke(main, ["replay", out])
        assert result.exit_code == 2

    @pytest.mark.parametrize("body", [
        {"protocol": "secure_rating", "inputs": [2, 4, 6], "seed": 5},
        {"protocol": "sum_of_powers", "inputs": [1, 2, 3], "seed": 5,
         "params": {"exponent": 2}},
        {"protocol": "example_f2", "inputs": [2, 3, 4], "seed": 5,
         "params": {"g": "square"}, "ring": {"ring": "Zm", "m": 11}},
        {"protocol": "millionaires_bitwise", "inputs": [5, 3], "seed": 5,
         "params": {"bit_width": 4}},
        {"protocol": "commit3", "inputs": [1, 0, 1], "seed": 5,
         "ring": {"ring": "Zm", "m": 2}},
        {"protocol": "ot_dummy", "seed": 5,
         "inputs": {"messages": [10, 20, 30], "indices": [1, 3]}},
        {"protocol": "card_deal", "seed": 5, "inputs": [],
         "params": {"r": 8, "k": 3, "N": 3, "with_labels": True}},
        {"protocol": "share_secret_kk", "inputs": [100], "seed": 5,
         "params": {"k": 3}},
    ])
    def test_round_trip_for_each_protocol(self, runner, tmp_path, body):
        out = self.make_transcript(runner, tmp_path, body)
        result = runner.invoke(main, ["replay", out])
        assert result.exit_code == 0, result.output


class TestVerify:
    def test_named_check_passes(self, runner, tmp_path):
        spec = write_config(tmp_path, "spec.json", {
            "checks": ["commit2_dummy/Z_2/D learns only n1+n2"],
        })
        result = runner.invoke(main, ["verify", "--spec", spec])
        assert result.exit_code == 0
        assert result.output.startswith("PASS")

    def test_unknown_check_exits_2(self, runner, tmp_path):
        spec = write_config(tmp_path, "spec.json", {"checks": ["bogus"]})
        assert runner.invoke(main, ["verify", "--spec", spec]).exit_code == 2

    def test_list_mode(self, runner):
        result = runner.invoke(main, ["verify", "--list"])
        assert result.exit_code == 0
        assert len(result.output.strip().split("\n")) == 24


class TestDeal:
    def test_52_cards(self, runner):
        result = runner.invoke(main, ["deal", "--cards", "52", "--players", "3",
                                      "--seed", "2"])
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert sorted(len(h) for h in body["hands"]) == [17, 17, 18]
        assert sorted(int(c) for c in body["labels"]) == list(range(1, 53))

    def test_two_player_mode(self, runner):
        result = runner.invoke(main, ["deal", "--cards", "6", "--players", "2",
                                      "--counter-bound", "4", "--seed", "1",
                                      "--dummies", "two-player"])
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert len(body["real_hands"]) == 2
        assert len(body["discarded"]) == 2

    def test_dealer_mode(self, runner):
        result = runner.invoke(main, ["deal", "--cards", "52", "--players", "2",
                                      "--per-player", "17", "--seed", "1"])
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert len(body["residual"]) == 18


class TestShareReconstruct:
    def test_round_trip(self, runner, tmp_path):
        shares = str(tmp_path / "shares.json")
        result = runner.invoke(main, ["share", "--secret", "12345", "--players", "4",
                                      "--seed", "3", "--out", shares])
        assert result.exit_code == 0
        result = runner.invoke(main, ["reconstruct", "--shares", shares])
        assert result.exit_code == 0
        assert json.loads(result.output) == {"secret": "12345"}

    def test_modular_round_trip(self, runner, tmp_path):
        shares = str(tmp_path / "shares.json")
        runner.invoke(main, ["share", "--secret", "5", "--players", "3",
                             "--modulus", "7", "--out", shares])
        result = runner.invoke(main, ["reconstruct", "--shares", shares])
        assert json.loads(result.output) == {"secret": "5"}

    def test_bad_shares_file(self, runner, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{}")
        assert runner.invoke(main, ["reconstruct", "--shares", str(path)]).exit_code == 2


class TestCommitFlow:
    def test_commit_then_decommit(self, runner, tmp_path):
        state = str(tmp_path / "c3.json")
        result = runner.invoke(main, ["commit3", "--values", "3,4,5",
                                      "--modulus", "10", "--seed", "1",
                                      "--state", state])
        assert result.exit_code == 0
        assert json.loads(result.output)["phase"] == "committed"
        result = runner.invoke(main, ["decommit3", "--state", state])
        assert result.exit_code == 0
        assert json.loads(result.output)["P1"] == ["3", "4", "5"]

    def test_tampered_reveal_exits_4(self, runner, tmp_path):
        state = str(tmp_path / "c3.json")
        runner.invoke(main, ["commit3", "--values", "1,0,1", "--modulus", "2",
                             "--seed", "2", "--state", state])
        # one of the two bit values differs from the honest reveal and must
        # trigger detection; the other is the honest value and passes
        codes = set()
        for value in ("0", "1"):
            result = runner.invoke(main, ["decommit3", "--state", state,
                                          "--tamper", f"s2+s3 reveal={value}"])
            codes.add(result.exit_code)
        assert codes == {0, 4}

    def test_edited_state_rejected(self, runner, tmp_path):
        state = str(tmp_path / "c3.json")
        runner.invoke(main, ["commit3", "--values", "3,4,5", "--modulus", "10",
                             "--seed", "1", "--state", state])
        body = json.loads(open(state).read())
        body["values"] = ["9", "4", "5"]
        open(state, "w").write(json.dumps(body))
        assert runner.invoke(main, ["decommit3", "--state", state]).exit_code == 2

    def test_commit2(self, runner):
        result = runner.invoke(main, ["commit2", "--values", "1,0", "--modulus", "2"])
        assert result.exit_code == 0
        assert json.loads(result.output) == {"A learns n2": "0", "B learns n1": "1"}
        result = runner.invoke(main, ["commit2", "--values", "1,0", "--modulus", "2",
                                      "--tamper", "n1+n2 to A=0"])
        assert result.exit_code == 4


class TestOT:
    def test_retrieval(self, runner):
        result = runner.invoke(main, ["ot", "--messages", "10,20,30",
                                      "--indices", "1,3", "--seed", "1"])
        assert result.exit_code == 0
        assert json.loads(result.output) == {"retrieved": ["10", "30"]}

    def test_bad_index_exits_2(self, runner):
        result = runner.invoke(main, ["ot", "--messages", "10,20", "--indices", "5"])
        assert result.exit_code == 2
