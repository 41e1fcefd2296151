# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Parsing and serialization of actions in the four action formats.

    markdown  RetrieveFromDatabase(sql="SELECT COUNT(*) FROM images")
    json      {"action_type": "RetrieveFromDatabase", "parameters": {"sql": "..."}}
    xml       <action><action_type>RetrieveFromDatabase</action_type>
              <parameters><sql>...</sql></parameters></action>
    yaml      action_type: RetrieveFromDatabase
              parameters:
                sql: ...

The configured format is authoritative: text in another format is malformed.
"""
import ast
import json
import xml.etree.ElementTree as ET
from collections.abc import Callable
from typing import Any

import yaml
from pydantic import ValidationError

from ..choices import ActionFormat
from ..exceptions import InvalidParameterError
from ..exceptions import MalformedActionError
from ..exceptions import MissingParameterError
from ..exceptions import UnknownActionTypeError
from ..literals import literal_from_node
from ..literals import LiteralSyntaxError
from ..literals import parse_expression
from ..literals import parse_strict_literal
from ..literals import strip_code_fences
from .models import Action
from .models import ACTION_TYPES

Parameters = dict[str, Any]

_EXPECTED = {
    ActionFormat.markdown: "expected ActionType(param1=value1, param2=value2, ...)",
    ActionFormat.json: 'expected {"action_type": "...", "parameters": {...}}',
    ActionFormat.xml: "expected <action><action_type>...</action_type>"
    "<parameters>...</parameters></action>",
    ActionFormat.yaml: "expected a mapping with keys action_type and parameters",
}


def _malformed(fmt: ActionFormat, detail: str) -> MalformedActionError:
    return MalformedActionError(fmt.value, f"{detail}; {_EXPECTED[fmt]}")


def action_class(action_type: str) -> type[Action]:
    try:
        return ACTION_TYPES[action_type]
    except KeyError:
        raise UnknownActionTypeError(action_type)


def build_action(
    fmt: ActionFormat, action_type: str, parameters: Parameters
) -> Action:
    """Instantiate an action from parsed parameters.

    Raises:
        UnknownActionTypeError: If the action type does not exist.
        MalformedActionError: If an unknown parameter is given.
        MissingParameterError: If required parameters are absent.
        InvalidParameterError: If a value does not fit its parameter.
    """
    cls = action_class(action_type)
    unknown = sorted(set(parameters) - set(cls.parameter_names()))
    if unknown:
        raise _malformed(
            fmt,
            f"unknown parameter(s) {', '.join(unknown)} for {action_type}, "
            f"valid parameters are {', '.join(cls.parameter_names())}",
        )
    missing = [name for name in cls.required_parameters() if name not in parameters]
    if missing:
        raise MissingParameterError(action_type, missing)
    try:
        return cls(**parameters)
    except ValidationError as error:
        details = "; ".join(
            f"{'.'.join(map(str, e['loc']))}: {e['msg']}" for e in error.errors()
        )
        raise InvalidParameterError(
            f"Invalid parameters for {action_type}: {details}"
        ) from error


def _split_envelope(fmt: ActionFormat, document: Any) -> tuple[str, Parameters]:
    if not isinstance(document, dict):
        raise _malformed(fmt, "the action is not a mapping")
    extra = set(document) - {"action_type", "parameters"}
    if extra:
        raise _malformed(fmt, f"unexpected keys {', '.join(sorted(extra))}")
    action_type = document.get("action_type")
    if not isinstance(action_type, str):
        raise _malformed(fmt, "action_type is missing or not a string")
    parameters = document.get("parameters") or {}
    if not isinstance(parameters, dict):
        raise _malformed(fmt, "parameters is not a mapping")
    return action_type, parameters


# -------- #
# Markdown #
# -------- #


def _parse_markdown(text: str) -> tuple[str, Parameters]:
    fmt = ActionFormat.markdown
    try:
        node = parse_expression(text)
    except LiteralSyntaxError as error:
        raise _malformed(fmt, f"invalid syntax ({error})")
    if not isinstance(node, ast.Call) or not isinstance(node.func, ast.Name):
        raise _malformed(fmt, "the action is not a call")
    action_type = node.func.id
    names = action_class(action_type).parameter_names()
    if len(node.args) > len(names):
        raise _malformed(fmt, f"too many positional arguments for {action_type}")
    parameters: Parameters = {}
    try:
        for name, argument in zip(names, node.args):
            if isinstance(argument, ast.Starred):
                raise _malformed(fmt, "starred arguments are not allowed")
            parameters[name] = literal_from_node(argument)
        for keyword in node.keywords:
            if keyword.arg is None:
                raise _malformed(fmt, "keyword unpacking is not allowed")
            if keyword.arg in parameters:
                raise _malformed(fmt, f"parameter {keyword.arg} given twice")
            parameters[keyword.arg] = literal_from_node(keyword.value)
    except LiteralSyntaxError as error:
        raise _malformed(fmt, f"parameter values must be literals ({error})")
    return action_type, parameters


def _serialize_markdown(action: Action) -> str:
    arguments = ", ".join(
        f"{name}={value!r}" for name, value in action.parameters().items()
    )
    return f"{action.action_type}({arguments})"


# ---- #
# JSON #
# ---- #


def _parse_json(text: str) -> tuple[str, Parameters]:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as error:
        raise _malformed(ActionFormat.json, f"invalid JSON ({error})")
    return _split_envelope(ActionFormat.json, document)


def _serialize_json(action: Action) -> str:
    return json.dumps(
        {"action_type": action.action_type, "parameters": action.parameters()},
        ensure_ascii=False,
    )


# --- #
# XML #
# --- #


def _xml_value(fmt: ActionFormat, action_type: str, element: ET.Element) -> Any:
    text = element.text or ""
    if element.get("format") == "json":
        try:
            return json.loads(text)
        except json.JSONDecodeError as error:
            raise _malformed(fmt, f"invalid JSON in <{element.tag}> ({error})")
    items = list(element)
    if any(child.tag != "item" for child in items):
        raise _malformed(fmt, f"<{element.tag}> may only contain <item> elements")
    cls = action_class(action_type)
    field = cls.__fields__.get(element.tag)
    origin = getattr(field.outer_type_, "__origin__", None) if field else None
    is_list = origin is list
    if items or (is_list and not text.strip()):
        values = []
        for item in items:
            try:
                values.append(parse_strict_literal(item.text or ""))
            except LiteralSyntaxError:
                values.append(item.text or "")
        return values
    if is_list:
        try:
            return parse_strict_literal(text)
        except LiteralSyntaxError as error:
            raise _malformed(fmt, f"<{element.tag}> is not a list ({error})")
    return text


def _parse_xml(text: str) -> tuple[str, Parameters]:
    fmt = ActionFormat.xml
    try:
        root = ET.fromstring(text)
    except ET.ParseError as error:
        raise _malformed(fmt, f"invalid XML ({error})")
    if root.tag != "action":
        raise _malformed(fmt, f"the root element is <{root.tag}>")
    type_element = root.find("action_type")
    if type_element is None or not (type_element.text or "").strip():
        raise _malformed(fmt, "<action_type> is missing")
    action_type = (type_element.text or "").strip()
    extra = [
        child.tag for child in root if child.tag not in ("action_type", "parameters")
    ]
    if extra:
        raise _malformed(fmt, f"unexpected elements {', '.join(extra)}")
    parameters: Parameters = {}
    parameters_element = root.find("parameters")
    for element in parameters_element if parameters_element is not None else []:
        if element.tag in parameters:
            raise _malformed(fmt, f"parameter {element.tag} given twice")
        parameters[element.tag] = _xml_value(fmt, action_type, element)
    return action_type, parameters


def _serialize_xml(action: Action) -> str:
    root = ET.Element("action")
    ET.SubElement(root, "action_type").text = action.action_type
    parameters = ET.SubElement(root, "parameters")
    for name, value in action.parameters().items():
        element = ET.SubElement(parameters, name)
        if isinstance(value, str):
            element.text = value
        elif name == "answer":
            element.set("format", "json")
            element.text = json.dumps(value, ensure_ascii=False)
        elif isinstance(value, list):
            for item in value:
                ET.SubElement(element, "item").text = json.dumps(item)
        else:
            element.text = json.dumps(value)
    return ET.tostring(root, encoding="unicode")


# ---- #
# YAML #
# ---- #


def _parse_yaml(text: str) -> tuple[str, Parameters]:
    fmt = ActionFormat.yaml
    if text.lstrip().startswith(("{", "[")):
        raise _malformed(fmt, "flow style documents are not accepted")
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as error:
        raise _malformed(fmt, f"invalid YAML ({error})")
    return _split_envelope(fmt, document)


def _serialize_yaml(action: Action) -> str:
    document = {"action_type": action.action_type, "parameters": action.parameters()}
    return yaml.safe_dump(
        document, sort_keys=False, allow_unicode=True, default_flow_style=False
    ).rstrip("\n")


_PARSERS: dict[ActionFormat, Callable[[str], tuple[str, Parameters]]] = {
    ActionFormat.markdown: _parse_markdown,
    ActionFormat.json: _parse_json,
    ActionFormat.xml: _parse_xml,
    ActionFormat.yaml: _parse_yaml,
}
_SERIALIZERS: dict[ActionFormat, Callable[[Action], str]] = {
    ActionFormat.markdown: _serialize_markdown,
    ActionFormat.json: _serialize_json,
    ActionFormat.xml: _serialize_xml,
    ActionFormat.yaml: _serialize_yaml,
}


def parse_action(text: str, fmt: ActionFormat) -> Action:
    """Parse exactly one action written in fmt.

    Surrounding code fences are ignored.

    Raises:
        MalformedActionError: If the text is not a single action in fmt.
        UnknownActionTypeError: If the action type does not exist.
        MissingParameterError: If required parameters are absent.
        InvalidParameterError: If a value does not fit its parameter.
    """
    fmt = ActionFormat(fmt)
    body = strip_code_fences(text)
    if not body:
        raise _malformed(fmt, "the action is empty")
    action_type, parameters = _PARSERS[fmt](body)
    return build_action(fmt, action_type, parameters)


def serialize_action(action: Action, fmt: ActionFormat) -> str:
    """Render an action in fmt, all parameters included."""
    return _SERIALIZERS[ActionFormat(fmt)](action)
