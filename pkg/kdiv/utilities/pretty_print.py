"""A very simple function for fitting output to a console"""


def fit_to_console(obj, initial_indent='', subsequent_indent='', width=None):
    """Return a string formatted to fit nicely in the console

    Pretty-prints the input object, then wraps each line of the result to the
    width of the output console.  Used by the command-line front end to echo
    normalized scenarios.

    Parameters
    ----------
    obj: object
        Python object to be printed
    initial_indent: str [defaults to '']
        Prepended to the first line of wrapped output.
    subsequent_indent: str [defaults to '']
        Prepended to all other lines of wrapped output.
    width: int or None [defaults to None]
        Full width of text to be output.  If None, the terminal size is detected.

    """
    import shutil
    import textwrap
    import pprint
    columns, lines = shutil.get_terminal_size()
    full_width = width or columns - 1
    text = pprint.pformat(obj, width=full_width - len(initial_indent), sort_dicts=True)
    wrapped = []
    for i, line in enumerate(text.splitlines()):
        indent = initial_indent if i == 0 else subsequent_indent
        wrapped.append(textwrap.fill(line, width=full_width, initial_indent=indent, subsequent_indent=subsequent_indent))
    return "\n".join(wrapped)
