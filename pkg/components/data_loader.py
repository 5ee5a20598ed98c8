# components/data_loader.py
import logging
import os

from components.code_core import load_code
from utils.errors import ParseError
from utils.file_utils import read_bytes

logger = logging.getLogger(__name__)


class DataLoader:
    """
    Loads code descriptors and payload files from paths or Streamlit uploads.

    Uploads are anything with ``name`` and ``getvalue()``, which is what
    ``st.file_uploader`` returns.
    """

    def _read(self, source):
        if hasattr(source, 'getvalue'):
            return source.getvalue(), source.name
        if not os.path.isfile(source):
            raise FileNotFoundError(f"No such file: {source}")
        return read_bytes(source), os.path.basename(source)

    def load_descriptor(self, source, verify=True, helper_sets='canonical'):
        """
        Load a CodeInstance from a descriptor file.

        Returns:
            tuple: (CodeInstance, name)
        """
        raw, name = self._read(source)
        try:
            text = raw.decode('utf-8')
        except UnicodeDecodeError as exc:
            raise ParseError(f"{name} is not UTF-8 text") from exc
        code = load_code(text, verify=verify, helper_sets=helper_sets)
        logger.info("Loaded descriptor %s: %r", name, code)
        return code, name

    def load_payload(self, source):
        """
        Load raw bytes to ingest.

        Returns:
            tuple: (bytes, name)
        """
        raw, name = self._read(source)
        logger.info("Loaded payload %s (%d bytes)", name, len(raw))
        return raw, name
