import random
import threading

import pytest
from hypothesis import given, settings, strategies as st

from idxdict.bitstream import BitReader, BitWriter
from idxdict.codec import (
    HEADER_SIZE,
    CompressedContainer,
    Frame,
    apply_case,
    bits_to_frame,
    case_mask,
    compress,
    decompress,
    encode_token,
    encode_tokens,
    frame_to_bits,
    frame_width,
    metrics,
    unpack,
)
from idxdict.dictionary import Dictionary
from idxdict.errors import (
    BadContainer,
    DictionaryFull,
    DictionaryMismatch,
    DictionaryTooOld,
    InvalidFrame,
    LengthMismatch,
    PositionUnknown,
    TrailingGarbage,
    TruncatedStream,
    ZeroOriginal,
)
from idxdict.tokenizer import Token, tokenize

from .oracles import pack_with_bitwriter, token_stream_bits


def bits_of(frame):
    w = BitWriter()
    frame_to_bits(frame, w)
    n = w.bit_cursor
    return format(int.from_bytes(w.finish(), "big") >> (-n % 8), f"0{n}b")


def test_case_mask_one_bit_per_letter():
    # first and last letters uppercase -> 1001
    assert format(case_mask("ThiS"), "04b") == "1001"
    assert format(case_mask("This"), "04b") == "1000"
    assert case_mask(b"any") == 0


@pytest.mark.parametrize(
    "word, cs, expected",
    [("this", "1001", "ThiS"), ("this", "1000", "This"), ("any", "000", "any"), ("ab", "11", "AB")],
)
def test_apply_case(word, cs, expected):
    assert apply_case(word, cs) == expected


def test_apply_case_mismatch():
    with pytest.raises(LengthMismatch):
        apply_case("this", "101")
    with pytest.raises(LengthMismatch):
        apply_case("ab", 0b100)


@given(st.text("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ", min_size=1, max_size=15))
def test_case_round_trip(word):
    assert apply_case(word.lower(), case_mask(word)) == word


def test_encode_space_run():
    fr = encode_token(Token.spaces(3), Dictionary())
    assert fr == Frame(0, 3)
    assert bits_of(fr) == "000011"


def test_encode_this_with_existing_entry():
    d = Dictionary()
    for w in ("tame", "tent", "this"):
        d.find_or_insert_main(w)
    fr = encode_token(Token.alpha(b"ThiS"), d)
    assert fr == Frame(3, 4, cs=0b1001, ic=20, pos=2)
    assert encode_token(Token.alpha(b"This"), d).cs == 0b1000
    assert d.seq == 3


def test_encode_short_word():
    d = Dictionary()
    fr = encode_token(Token.alpha(b"a"), d)
    assert fr == Frame(3, 1, cs=0, pos=0)
    assert fr.width == 15
    assert bits_of(fr) == "11" "0001" "0" "00000000"


def test_encode_special_has_no_case():
    d = Dictionary()
    fr = encode_token(Token.special(b", "), d)
    assert fr == Frame(2, 2, pos=0)
    assert fr.cs is None


def test_frame_bit_examples():
    assert bits_of(Frame(0, 1)) == "000001"
    assert bits_to_frame(BitReader(bytes([0b11000100, 0b00000000]))) == Frame(3, 1, cs=0, pos=0)
    with pytest.raises(InvalidFrame):
        bits_to_frame(BitReader(b"\x00"))


@pytest.mark.parametrize(
    "frame",
    [
        Frame(0, 0),
        Frame(0, 16),
        Frame(4, 1),
        Frame(0, 1, pos=0),
        Frame(2, 3),
        Frame(2, 3, cs=0, pos=0),
        Frame(3, 2, cs=0, ic=1, pos=0),
        Frame(3, 3, cs=0, pos=0),
        Frame(3, 3, cs=0, ic=0, pos=0),
        Frame(3, 3, cs=0, ic=27, pos=0),
        Frame(3, 3, cs=8, ic=1, pos=0),
        Frame(3, 3, cs=0, ic=1, pos=256),
    ],
)
def test_invalid_frames(frame):
    with pytest.raises(InvalidFrame):
        frame.check()


def test_bad_initial_on_read():
    w = BitWriter().write_bits(3, 2).write_bits(3, 4).write_bits(0, 3).write_bits(27, 5).write_bits(0, 8)
    with pytest.raises(InvalidFrame):
        bits_to_frame(BitReader(w.finish()))


def test_truncated_frame():
    with pytest.raises(TruncatedStream):
        bits_to_frame(BitReader(bytes([0b11001100])))


def all_frames(rng, per_class=20):
    for nc in range(1, 16):
        yield Frame(0, nc)
        yield Frame(1, nc)
        for _ in range(per_class):
            yield Frame(2, nc, pos=rng.randrange(256))
            ic = rng.randint(1, 26) if nc >= 3 else None
            yield Frame(3, nc, cs=rng.randrange(1 << nc), ic=ic, pos=rng.randrange(256))


def test_frame_inverse_exhaustive():
    rng = random.Random(1234)
    frames = list(all_frames(rng))
    for fr in frames:
        w = BitWriter()
        frame_to_bits(fr, w)
        assert w.bit_cursor == fr.width == frame_width(fr.f, fr.nc)
        assert bits_to_frame(BitReader(w.finish())) == fr
    # back to back in one stream
    r = BitReader(pack_with_bitwriter(frames))
    assert [bits_to_frame(r) for _ in frames] == frames


def test_widths():
    assert [frame_width(0, 5), frame_width(1, 1), frame_width(2, 9), frame_width(3, 2), frame_width(3, 7)] == [6, 6, 14, 16, 26]


# -- container / compress -----------------------------------------------------

def test_compress_empty():
    d = Dictionary()
    c = compress(b"", d)
    assert (c.frame_count, c.payload, c.required_seq) == (0, b"", 0)
    assert len(c.to_bytes()) == HEADER_SIZE == 25
    assert decompress(c, d) == b""


def test_compress_a_a_a():
    d = Dictionary()
    c = compress(b"a a a", d)
    assert c.frame_count == 5
    assert token_stream_bits(b"a a a") == 15 + 6 + 15 + 6 + 15 == 57
    assert len(c.payload) == 8
    assert d.seq == 1 and c.required_seq == 1
    assert d.lookup_short(0) == "a"
    assert decompress(c, d) == b"a a a"


def test_header_layout():
    d = Dictionary(id=0x0102030405060708)
    c = compress(b"hi", d)
    raw = c.to_bytes()
    assert raw[:4] == b"IDXD" and raw[4] == 1
    assert raw[5:13] == bytes([8, 7, 6, 5, 4, 3, 2, 1])
    assert int.from_bytes(raw[13:21], "little") == 1
    assert int.from_bytes(raw[21:25], "little") == 1
    assert CompressedContainer.from_bytes(raw) == c


def test_payload_matches_bitwriter_route(poem):
    d = Dictionary()
    frames = encode_tokens(tokenize(poem), d)
    c = compress(poem, Dictionary(id=d.id))
    assert c.payload == pack_with_bitwriter(frames)


def test_payload_bits_match_token_oracle(poem):
    d = Dictionary()
    c = compress(poem, d)
    frames = unpack(c)
    assert sum(f.width for f in frames) == token_stream_bits(poem)
    assert len(c.payload) == (token_stream_bits(poem) + 7) // 8


def test_decompress_accepts_raw_bytes(poem):
    d = Dictionary()
    assert decompress(compress(poem, d).to_bytes(), d) == poem


def test_wrong_dictionary():
    d = Dictionary()
    c = compress(b"hello", d)
    with pytest.raises(DictionaryMismatch):
        decompress(c, Dictionary())


def test_dictionary_too_old():
    d = Dictionary()
    old = Dictionary.loads(d.dumps())
    c = compress(b"hello world", d)
    with pytest.raises(DictionaryTooOld):
        decompress(c, old)


def test_grown_dictionary_still_decodes(poem):
    d = Dictionary()
    c = compress(poem, d)
    for w in ("zebra", "quokka", "xylophone", "an", "zz"):
        d.find_or_insert_main(w) if len(w) >= 3 else d.find_or_insert_short(w)
    d.find_or_insert_special(b"#!")
    assert decompress(c, d) == poem


def test_determinism(poem):
    d1, d2 = Dictionary(id=7), Dictionary(id=7)
    assert compress(poem, d1).to_bytes() == compress(poem, d2).to_bytes()


@pytest.mark.parametrize(
    "mangle, error",
    [
        (lambda c: CompressedContainer(c.dict_id, c.required_seq, c.frame_count, c.payload + b"\x00"), TrailingGarbage),
        (lambda c: CompressedContainer(c.dict_id, c.required_seq, c.frame_count, c.payload[:-1] + bytes([c.payload[-1] | 1])), TrailingGarbage),
        (lambda c: CompressedContainer(c.dict_id, c.required_seq, c.frame_count + 1, c.payload), TruncatedStream),
        (lambda c: CompressedContainer(c.dict_id, c.required_seq, c.frame_count, c.payload[:-2]), TruncatedStream),
        (lambda c: CompressedContainer(c.dict_id, c.required_seq, c.frame_count - 1, c.payload), TrailingGarbage),
    ],
)
def test_corrupt_payloads(mangle, error):
    d = Dictionary()
    c = compress(b"Hi there", d)  # 16+6+24 = 46 bits, 2 padding bits
    with pytest.raises(error):
        decompress(mangle(c), d)


def test_zero_count_frame_detected():
    d = Dictionary()
    c = CompressedContainer(d.id, 0, 1, b"\x00")
    with pytest.raises(InvalidFrame):
        decompress(c, d)


def test_unknown_position():
    d = Dictionary()
    payload = pack_with_bitwriter([Frame(2, 3, pos=0)])
    with pytest.raises(PositionUnknown):
        decompress(CompressedContainer(d.id, 0, 1, payload), d)


def test_bad_container_header():
    with pytest.raises(BadContainer):
        CompressedContainer.from_bytes(b"IDXD")
    with pytest.raises(BadContainer):
        CompressedContainer.from_bytes(b"NOPE" + bytes(21))
    with pytest.raises(BadContainer):
        CompressedContainer.from_bytes(b"IDXD\x02" + bytes(20))


def test_dictionary_full_aborts():
    d = Dictionary()
    words = [a + b + c for a in "a" for b in "abcdefghijklmnopqrstuvwxyz" for c in "abcdefghijklmnopqrstuvwxyz"]
    for w in words[:256]:
        d.find_or_insert_main(w)
    with pytest.raises(DictionaryFull):
        compress(words[256].encode(), d)


def test_concurrent_compressions_share_dictionary(poem):
    d = Dictionary()
    texts = [poem, poem.upper(), b"lorem ipsum dolor sit amet, consectetur", poem[::-1]]
    out = {}

    def job(i):
        out[i] = compress(texts[i], d)

    threads = [threading.Thread(target=job, args=(i,)) for i in range(len(texts))]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for i, text in enumerate(texts):
        assert decompress(out[i], d) == text


def test_metrics():
    m = metrics(574, 298)
    assert (m.compressed_percent, m.compression_ratio) == (48.08, 0.5192)
    m = metrics(100, 100)
    assert (m.compressed_percent, m.compression_ratio) == (0.0, 1.0)
    with pytest.raises(ZeroOriginal):
        metrics(0, 10)


adversarial = st.lists(
    st.sampled_from([b" ", b" " * 17, b"\n", b"\n" * 20, b"\r\n", b"\t", b",", b", ", b"-", b"...",
                     b"I", b"an", b"The", b"HeLLo", b"Supercalifragilistic", b"x" * 31, b"a12", b"\xe9t\xe9",
                     b"\x00", b"%"]),
    max_size=50,
).map(b"".join)


@settings(max_examples=200)
@given(st.one_of(st.binary(max_size=400), adversarial))
def test_round_trip_property(data):
    d = Dictionary()
    c = compress(data, d)
    assert decompress(CompressedContainer.from_bytes(c.to_bytes()), d) == data
    assert len(c.payload) == (token_stream_bits(data) + 7) // 8


@settings(max_examples=50)
@given(st.binary(max_size=200), st.lists(st.text("abcdefghijklmnopqrstuvwxyz", min_size=3, max_size=15), max_size=30))
def test_growth_property(data, extra):
    d = Dictionary()
    c = compress(data, d)
    for w in extra:
        try:
            d.find_or_insert_main(w)
        except Exception:
            pass
    assert decompress(c, d) == data
