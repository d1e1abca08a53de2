from .marked_yaml import ValidationError
