from rpmem.cli import main

main()
