from abc import ABC, abstractmethod
from fs import open_fs
from fs.base import FS
from fs.path import dirname
from fs.wrap import read_only

from . import _log as log


class SideEffects(ABC):
    """
    Abstract side effects class.
    """
    root_fs: FS

    def __init__(self, root_fs):
        self.root_fs = root_fs

    def cwd_fs(self) -> FS:
        """
        Read-only version of the current working directory.
        """
        return read_only(self.root_fs)

    @abstractmethod
    def output_fs(self) -> FS:
        """
        Generate an FS for written datasets, reports and tables.
        """

    def write_text(self, path: str, text: str) -> str:
        """
        Write ``text`` to ``path`` in the output FS, creating parent
        directories, and return the path written.
        """
        output_fs = self.output_fs()
        parent = dirname(path)
        if parent:
            output_fs.makedirs(parent, recreate=True)
        log.info(f'Writing {path}')
        output_fs.writetext(path, text)
        return path


class RealSideEffects(SideEffects):
    """
    Perform real side effects that write into the working directory.
    """
    def output_fs(self) -> FS:
        return self.root_fs


class DryRunSideEffects(SideEffects):
    """
    Dry run side effects that write only temporary files.
    """
    def __init__(self, root_fs: FS):
        super(DryRunSideEffects, self).__init__(root_fs)
        self._temp_fs = None

    def output_fs(self) -> FS:
        if self._temp_fs is None:
            self._temp_fs = open_fs('temp://')
        return self._temp_fs

    def write_text(self, path: str, text: str) -> str:
        log.info(f'Dry run of write_text: {path!r} ({len(text)} characters)')
        return super(DryRunSideEffects, self).write_text(path, text)


def make_effects(root_fs: FS, dry_run: bool) -> SideEffects:
    """
    Make the most appropriate ``SideEffects`` instance.
    """
    Effects = DryRunSideEffects if dry_run else RealSideEffects
    return Effects(root_fs)
