from .keyvalue import read_key_values, write_key_values

__all__ = ["read_key_values", "write_key_values"]
