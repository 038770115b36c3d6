"""ECMAScript 5 front end: parser, ESTree loader and program enumeration."""

from .analysis import CallSiteInfo, FunctionInfo, enumerate_call_sites, enumerate_functions
from .ast import Ast, Node
from .estree import load_ast_document
from .parser import parse_program

__all__ = ["Ast", "CallSiteInfo", "FunctionInfo", "Node", "enumerate_call_sites", "enumerate_functions",
           "load_ast_document", "parse_program"]
