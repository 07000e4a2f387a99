import pytest

from roundtrip_support import DIRECTIONS, EXCEPTIONS, converters, random_strings


@pytest.mark.parametrize("key", DIRECTIONS)
def test_random_strings_roundtrip(key):
    fwd, back = converters(key)
    failures = [s for s in random_strings(key, 1000) if back(fwd(s)) != s]
    assert failures == []


def _exception_cases():
    for key in DIRECTIONS:
        for example in EXCEPTIONS[key]["examples"]:
            yield pytest.param(key, example["text"], id=f"{key.replace(' ', '-')}-{example['char']}",
                               marks=pytest.mark.xfail(strict=True, reason=EXCEPTIONS["_reasons"][example["reason"]]))


@pytest.mark.parametrize("key,text", list(_exception_cases()))
def test_documented_exception(key, text):
    fwd, back = converters(key)
    assert back(fwd(text)) == text
