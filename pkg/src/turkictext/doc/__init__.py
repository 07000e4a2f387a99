from turkictext.doc.conllu import ConlluParseError, from_conllu, to_conllu
from turkictext.doc.jsonio import DocumentSchemaError, document_schema, from_json, to_json
from turkictext.doc.model import Document, ProcessorRecord, Sentence, Span, Token, Word

__all__ = [
    "ConlluParseError",
    "Document",
    "DocumentSchemaError",
    "ProcessorRecord",
    "Sentence",
    "Span",
    "Token",
    "Word",
    "document_schema",
    "from_conllu",
    "from_json",
    "to_conllu",
    "to_json",
]
