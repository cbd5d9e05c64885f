from markedgroups.cli import main

main()
