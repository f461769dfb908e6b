"""Canonical country identity shared by every network layer.

All layers of a multiplex resolve country codes through one
:class:`NodeRegistry`, so a country keeps the same dense integer index
everywhere. Codes follow ISO 3166-1 alpha-3 (three uppercase ASCII
letters); the registry sorts codes once at construction, which makes
indices deterministic for a given code set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import ValidationError, UnknownCountryError

_CODE_RE = re.compile(r"^[A-Z]{3}$")


def validate_code(code: str) -> str:
    if not isinstance(code, str) or not _CODE_RE.match(code):
        raise ValidationError(f"invalid country code {code!r} (expected [A-Z]{{3}})")
    return code


@dataclass(frozen=True)
class CountryId:
    """A country code together with its registry index."""

    code: str
    index: int


class NodeRegistry:
    """Immutable bijection between country codes and dense indices."""

    def __init__(self, codes: Iterable[str]):
        unique = sorted({validate_code(c) for c in codes})
        self._codes: tuple[str, ...] = tuple(unique)
        self._index: dict[str, int] = {c: i for i, c in enumerate(self._codes)}

    @property
    def codes(self) -> tuple[str, ...]:
        return self._codes

    def __len__(self) -> int:
        return len(self._codes)

    def __iter__(self) -> Iterator[str]:
        return iter(self._codes)

    def __contains__(self, code: str) -> bool:
        return code in self._index

    def index(self, code: str) -> int:
        """Dense index of ``code``; raises UnknownCountryError if absent."""
        try:
            return self._index[code]
        except KeyError:
            raise UnknownCountryError(code) from None

    def code(self, index: int) -> str:
        return self._codes[index]

    def country(self, code: str) -> CountryId:
        return CountryId(code, self.index(code))

    def resolve(self, country: "str | CountryId") -> int:
        """Accept either a code string or a CountryId and return the index."""
        if isinstance(country, CountryId):
            if (
                country.index >= len(self._codes)
                or self._codes[country.index] != country.code
            ):
                raise UnknownCountryError(country.code)
            return country.index
        return self.index(country)

    def extended(self, codes: Iterable[str]) -> "NodeRegistry":
        """New registry containing this registry's codes plus ``codes``.

        Indices are reassigned (the union is re-sorted), so graphs built
        on the old registry must not be mixed with the new one.
        """
        return NodeRegistry(list(self._codes) + list(codes))

    def __repr__(self) -> str:  # pragma: no cover
        return f"NodeRegistry({len(self._codes)} countries)"
