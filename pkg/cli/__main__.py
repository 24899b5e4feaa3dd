from cli import wignerwalk

if __name__ == "__main__":
    wignerwalk()
